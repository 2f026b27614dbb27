#include "attrforge/features.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "attrforge/templates.hpp"

namespace attrforge {

void KeywordTable::set(std::string surface, std::string pos, double score) {
    entries_[{std::move(surface), std::move(pos)}] = score;
}

bool KeywordTable::contains(std::string_view surface, std::string_view pos) const {
    return score(surface, pos).has_value();
}

std::optional<double> KeywordTable::score(std::string_view surface, std::string_view pos) const {
    const auto it = entries_.find({std::string(surface), std::string(pos)});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

double chi_square(double a, double b, double c, double d) {
    const double n = a + b + c + d;
    const double denom = (a + b) * (c + d) * (a + c) * (b + d);
    if (denom <= 0.0) return 0.0;
    const double diff = a * d - b * c;
    return n * diff * diff / denom;
}

Span between_span(const CandidateInstance& cand) {
    const std::size_t lo = std::min(cand.e1.end, cand.e2.end);
    const std::size_t hi = std::max(cand.e1.start, cand.e2.start);
    if (hi <= lo) return {lo, lo};
    return {lo, hi};
}

std::vector<std::size_t> keyword_region(const CandidateInstance& cand) {
    const std::size_t n = cand.sentence->tokens.size();
    std::set<std::size_t> region;
    const Span between = between_span(cand);
    for (std::size_t i = between.start; i < between.end; ++i) region.insert(i);
    for (const Span& s : {cand.e1, cand.e2}) {
        for (std::size_t d = 1; d <= 2; ++d) {
            if (s.start >= d) region.insert(s.start - d);
            if (s.end + d - 1 < n) region.insert(s.end + d - 1);
        }
    }
    std::vector<std::size_t> out;
    for (std::size_t i : region) {
        if (i >= cand.e1.start && i < cand.e1.end) continue;
        if (i >= cand.e2.start && i < cand.e2.end) continue;
        out.push_back(i);
    }
    return out;
}

namespace {

bool keyword_pos(std::string_view pos) {
    return pos == "n" || pos == "v";
}

std::set<KeywordTable::Key> region_words(const CandidateInstance& cand) {
    std::set<KeywordTable::Key> words;
    for (std::size_t i : keyword_region(cand)) {
        const auto& t = cand.sentence->tokens[i];
        if (keyword_pos(t.pos)) words.insert({t.surface, t.pos});
    }
    return words;
}

}  // namespace

KeywordTable select_keywords(std::span<const LabeledCandidate> train, KeywordParams params) {
    KeywordTable table(params);
    if (train.empty()) return table;

    // Document frequency of each word, overall and per label.
    std::map<KeywordTable::Key, std::size_t> df;
    std::map<KeywordTable::Key, std::map<AttributeLabel, std::size_t>> df_by_label;
    std::map<AttributeLabel, std::size_t> label_count;
    for (const auto& lc : train) {
        ++label_count[lc.label];
        for (auto& w : region_words(lc.candidate)) {
            ++df[w];
            ++df_by_label[w][lc.label];
        }
    }

    const double n = static_cast<double>(train.size());
    std::map<KeywordTable::Key, double> best;
    for (AttributeLabel label : kPositiveLabels) {
        const double with_label = static_cast<double>(label_count[label]);
        std::vector<std::pair<double, const KeywordTable::Key*>> ranked;
        for (const auto& [word, freq] : df) {
            if (freq < params.min_frequency) continue;
            const auto& by_label = df_by_label[word];
            const auto it = by_label.find(label);
            const double a = it == by_label.end() ? 0.0 : static_cast<double>(it->second);
            const double b = static_cast<double>(freq) - a;
            const double c = with_label - a;
            const double d = n - a - b - c;
            ranked.emplace_back(chi_square(a, b, c, d), &word);
        }
        // Score descending; ties on (surface, pos) ascending.
        std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first > y.first;
            return *x.second < *y.second;
        });
        const std::size_t keep = std::min(ranked.size(), params.top_k_per_label);
        for (std::size_t i = 0; i < keep; ++i) {
            auto [it, inserted] = best.emplace(*ranked[i].second, ranked[i].first);
            if (!inserted) it->second = std::max(it->second, ranked[i].first);
        }
    }
    for (auto& [word, score] : best) table.set(word.first, word.second, score);
    return table;
}

void add_rule_literals(KeywordTable& table, const RuleSet& rules,
                       std::span<const LabeledCandidate> train) {
    std::set<std::string, std::less<>> literals;
    for (const auto& rule : rules.rules()) {
        for (const auto& atom : rule.pattern) {
            if (const auto* lit = std::get_if<LiteralAtom>(&atom)) literals.insert(lit->surface);
        }
    }
    if (literals.empty()) return;
    for (const auto& lc : train) {
        for (const auto& [surface, pos] : region_words(lc.candidate)) {
            if (literals.contains(surface) && !table.contains(surface, pos)) {
                table.set(surface, pos, 0.0);
            }
        }
    }
}

std::optional<std::uint32_t> FeatureMap::find(std::string_view key) const {
    const auto it = index_.find(std::string(key));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint32_t FeatureMap::intern(std::string_view key) {
    if (auto id = find(key)) return *id;
    if (frozen_) throw std::logic_error("cannot add features to a frozen map");
    const auto id = static_cast<std::uint32_t>(keys_.size());
    keys_.emplace_back(key);
    index_.emplace(keys_.back(), id);
    return id;
}

FeatureMap FeatureMap::from_keys(std::vector<std::string> keys, bool frozen) {
    FeatureMap map;
    for (auto& key : keys) {
        if (map.find(key)) throw std::invalid_argument("duplicate feature key '" + key + "'");
        map.intern(key);
    }
    map.frozen_ = frozen;
    return map;
}

SparseVector SparseVector::from_dense(std::span<const double> dense) {
    SparseVector v;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        if (dense[i] != 0.0) {
            v.columns.push_back(static_cast<std::uint32_t>(i));
            v.values.push_back(dense[i]);
        }
    }
    return v;
}

std::vector<std::string> feature_keys(const CandidateInstance& cand, const KeywordTable& keywords) {
    const auto& tokens = cand.sentence->tokens;
    std::vector<std::string> keys;

    for (std::size_t i : keyword_region(cand)) {
        const auto& t = tokens[i];
        if (keywords.contains(t.surface, t.pos)) keys.push_back("kw:" + t.surface);
    }

    const Span between = between_span(cand);
    for (std::size_t i = between.start; i + 1 < between.end; ++i) {
        keys.push_back("tag2:" + tokens[i].pos + "_" + tokens[i + 1].pos);
        if (i + 2 < between.end) {
            keys.push_back("tag3:" + tokens[i].pos + "_" + tokens[i + 1].pos + "_" +
                           tokens[i + 2].pos);
        }
    }

    struct Offset {
        std::string_view name;
        long delta;
    };
    static constexpr Offset kOffsets[] = {{"-2", -2}, {"-1", -1}, {"+1", 1}};
    const auto n = static_cast<long>(tokens.size());
    for (const auto& [slot, span] : {std::pair{"E1", cand.e1}, std::pair{"E2", cand.e2}}) {
        for (const auto& off : kOffsets) {
            const long idx = off.delta < 0 ? static_cast<long>(span.start) + off.delta
                                           : static_cast<long>(span.end) + off.delta - 1;
            const std::string prefix =
                std::string("ctx:") + slot + ":" + std::string(off.name) + ":";
            if (idx < 0 || idx >= n) {
                const char* edge = idx < 0 ? "BOS" : "EOS";
                for (const char* kind : {"surface", "pos", "ne"}) {
                    keys.push_back(prefix + kind + "=" + edge);
                }
                continue;
            }
            const auto& t = tokens[static_cast<std::size_t>(idx)];
            keys.push_back(prefix + "surface=" + t.surface);
            keys.push_back(prefix + "pos=" + t.pos);
            keys.push_back(prefix + "ne=" + std::string(to_string(t.ne)));
        }
    }

    std::sort(keys.begin(), keys.end());
    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
    return keys;
}

namespace {

SparseVector finish(std::vector<std::uint32_t> cols) {
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return SparseVector{std::move(cols), {}};
}

}  // namespace

SparseVector vectorize(const CandidateInstance& cand, FeatureMap& map, const KeywordTable& keywords) {
    if (map.frozen()) return vectorize(cand, std::as_const(map), keywords);
    std::vector<std::uint32_t> cols;
    for (const auto& key : feature_keys(cand, keywords)) cols.push_back(map.intern(key));
    return finish(std::move(cols));
}

SparseVector vectorize(const CandidateInstance& cand, const FeatureMap& map,
                       const KeywordTable& keywords) {
    std::vector<std::uint32_t> cols;
    for (const auto& key : feature_keys(cand, keywords)) {
        if (auto id = map.find(key)) cols.push_back(*id);
    }
    return finish(std::move(cols));
}

}  // namespace attrforge
