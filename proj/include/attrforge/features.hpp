#pragma once

// Candidate feature extraction: keywords, POS n-grams over the tokens between
// the entities, and POS/NE/surface context around each entity.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "attrforge/corpus.hpp"

namespace attrforge {

class RuleSet;

struct KeywordParams {
    std::size_t min_frequency = 3;
    std::size_t top_k_per_label = 200;

    friend bool operator==(const KeywordParams&, const KeywordParams&) = default;
};

// Keyed by (surface, pos) with pos in {n, v}; value is the keyword score.
class KeywordTable {
public:
    using Key = std::pair<std::string, std::string>;

    KeywordTable() = default;
    explicit KeywordTable(KeywordParams params) : params_(params) {}

    void set(std::string surface, std::string pos, double score);
    bool contains(std::string_view surface, std::string_view pos) const;
    std::optional<double> score(std::string_view surface, std::string_view pos) const;

    const std::map<Key, double>& entries() const noexcept { return entries_; }
    const KeywordParams& params() const noexcept { return params_; }
    std::size_t size() const noexcept { return entries_.size(); }

    friend bool operator==(const KeywordTable&, const KeywordTable&) = default;

private:
    std::map<Key, double> entries_;
    KeywordParams params_;
};

// 2x2 chi-square: a = word & label, b = word & not label, c = label without
// word, d = neither. Zero when any marginal is zero.
double chi_square(double a, double b, double c, double d);

// Tokens between the entities plus two tokens either side of each entity.
std::vector<std::size_t> keyword_region(const CandidateInstance& cand);

// Tokens strictly between the two entity spans, in sentence order.
Span between_span(const CandidateInstance& cand);

KeywordTable select_keywords(std::span<const LabeledCandidate> train, KeywordParams params = {});

// Adds rule-file literals that occur as nouns or verbs in the training
// candidates' keyword regions. Existing scores are kept; new entries get 0.
void add_rule_literals(KeywordTable& table, const RuleSet& rules,
                       std::span<const LabeledCandidate> train);

// Bijection between feature keys and column ids. A frozen map never grows.
class FeatureMap {
public:
    std::optional<std::uint32_t> find(std::string_view key) const;
    // Adds the key if absent. Throws std::logic_error when frozen.
    std::uint32_t intern(std::string_view key);

    void freeze() noexcept { frozen_ = true; }
    bool frozen() const noexcept { return frozen_; }
    std::size_t size() const noexcept { return keys_.size(); }
    const std::vector<std::string>& keys() const noexcept { return keys_; }

    // Rebuilds a map from keys in column order. Throws on duplicates.
    static FeatureMap from_keys(std::vector<std::string> keys, bool frozen);

    friend bool operator==(const FeatureMap& a, const FeatureMap& b) {
        return a.frozen_ == b.frozen_ && a.keys_ == b.keys_;
    }

private:
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::string> keys_;
    bool frozen_ = false;
};

// Sparse feature vector with strictly increasing columns. An empty values
// array means every stored value is 1 (binary features).
struct SparseVector {
    std::vector<std::uint32_t> columns;
    std::vector<double> values;

    double value(std::size_t i) const { return values.empty() ? 1.0 : values[i]; }
    std::size_t nnz() const noexcept { return columns.size(); }

    // Drops zeros.
    static SparseVector from_dense(std::span<const double> dense);

    friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

// Feature keys emitted for a candidate, sorted and unique.
std::vector<std::string> feature_keys(const CandidateInstance& cand, const KeywordTable& keywords);

// Training-time vectorization: unseen keys are added unless the map is frozen.
SparseVector vectorize(const CandidateInstance& cand, FeatureMap& map, const KeywordTable& keywords);
// Inference-time vectorization: unknown keys are dropped.
SparseVector vectorize(const CandidateInstance& cand, const FeatureMap& map,
                       const KeywordTable& keywords);

}  // namespace attrforge
