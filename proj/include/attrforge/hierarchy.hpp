#pragma once

// Hierarchical classifier: fast-track rules, a binary relevance layer that
// separates the positive attributes from Other, and a one-vs-one leaf layer
// over the positive attributes decided by cumulative voting.

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "attrforge/corpus.hpp"
#include "attrforge/svm.hpp"

namespace attrforge {

struct FastTrackRule {
    int priority = 0;
    std::optional<NeTag> e1_ne;  // nullopt = any
    std::optional<NeTag> e2_ne;
    AttributeLabel target = AttributeLabel::BirthDate;

    friend bool operator==(const FastTrackRule&, const FastTrackRule&) = default;
};

// Condition syntax: "e2=TIME", "e1=PER&e2=LOC".
std::optional<std::pair<std::optional<NeTag>, std::optional<NeTag>>> parse_fast_track_condition(
    std::string_view text);
std::string format_fast_track_condition(const FastTrackRule& rule);

// Non-leaf nodes discriminate {Relevant, Other}; the last node is the leaf
// over positive attribute labels.
struct HierarchyNode {
    std::vector<std::string> categories;

    std::size_t arity() const noexcept { return categories.size(); }
    friend bool operator==(const HierarchyNode&, const HierarchyNode&) = default;
};

inline constexpr std::string_view kRelevantCategory = "Relevant";

struct HierarchyConfig {
    std::vector<HierarchyNode> layers;
    std::vector<FastTrackRule> fast_track;

    // relevance {Relevant, Other} -> leaf {BirthDate, BirthPlace, Father, Mother},
    // fast track e2=TIME -> BirthDate.
    static HierarchyConfig default_config();
    // Single one-vs-one node over the four attributes, no fast track.
    static HierarchyConfig flat();

    bool has_relevance_layer() const;
    // Leaf labels in canonical order. Requires a validated config.
    std::vector<AttributeLabel> leaf_labels() const;
    std::size_t k() const { return leaf_labels().size(); }

    // Throws std::invalid_argument on an unsupported topology.
    void validate() const;

    // "{Relevant,Other} {BirthDate,BirthPlace,Father,Mother}"
    std::string format_layers() const;
    static std::vector<HierarchyNode> parse_layers(std::string_view text);

    friend bool operator==(const HierarchyConfig&, const HierarchyConfig&) = default;
};

// N_sum = sum over nodes of p_i (p_i - 1) / 2.
std::size_t classifier_count(const HierarchyConfig& config);
std::size_t classifier_count(std::span<const std::size_t> node_arities);

std::optional<AttributeLabel> apply_fast_track(std::span<const FastTrackRule> rules,
                                               const CandidateInstance& cand);

using LabelPair = std::pair<AttributeLabel, AttributeLabel>;  // first < second

struct HierarchyModel {
    HierarchyConfig config;
    std::optional<SvmModel> relevance;
    // Positive decision value votes for pair.first.
    std::map<LabelPair, SvmModel> pairwise;

    friend bool operator==(const HierarchyModel&, const HierarchyModel&) = default;
};

struct LabeledVector {
    SparseVector x;
    AttributeLabel label = AttributeLabel::Other;
};

struct BinaryTask {
    std::string node;  // "relevance" or "BirthDate/Father"
    std::size_t positives = 0;
    std::size_t negatives = 0;
};

struct HierarchyTrainOptions {
    SvmParams svm;
    std::size_t dimension = 0;  // 0 = infer from the data
    unsigned threads = 1;
    // Invoked once per binary training, before it runs; must be thread-safe
    // when threads > 1.
    std::function<void(const BinaryTask&)> on_binary_train;
};

// Throws std::invalid_argument naming the label when a needed label has no
// training instances.
HierarchyModel train_hierarchy(std::span<const LabeledVector> train, const HierarchyConfig& config,
                               const HierarchyTrainOptions& options);

struct Classification {
    AttributeLabel label = AttributeLabel::Other;
    double score = 0.0;  // +inf for fast-tracked candidates
    bool fast_tracked = false;
};

// Vote count wins; ties go to the larger clipped-margin sum, then to the
// earlier label in canonical order.
Classification leaf_vote(const HierarchyModel& model, const SparseVector& x);

Classification classify(const HierarchyModel& model, const CandidateInstance& cand,
                        const SparseVector& x);

}  // namespace attrforge
