#include "attrforge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <map>
#include <thread>

#include "attrforge/error.hpp"
#include "text_util.hpp"

namespace attrforge {

namespace {

std::string_view value_of(std::string_view key_eq_value, std::size_t eq) {
    return detail::trim(key_eq_value.substr(eq + 1));
}

}  // namespace

void apply_config(TrainingOptions& options, std::string_view text) {
    std::map<std::int64_t, FastTrackRule> fast_track;
    std::map<std::int64_t, std::pair<bool, bool>> seen;  // (cond, target) per priority
    bool fast_track_given = false;
    bool fast_track_enabled = true;

    std::size_t line_no = 0;
    for (auto raw : detail::split_lines(text)) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ParseError("expected key = value", line_no);
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = value_of(line, eq);
        const auto bad = [&](const char* what) {
            return ParseError(std::string(what) + " for '" + std::string(key) + "'", line_no);
        };
        const auto real = [&] {
            auto v = detail::parse_double(value);
            if (!v) throw bad("expected a number");
            return *v;
        };
        const auto count = [&] {
            auto v = detail::parse_size(value);
            if (!v) throw bad("expected a non-negative integer");
            return *v;
        };

        if (key == "hierarchy.layers") {
            try {
                options.hierarchy.layers = HierarchyConfig::parse_layers(value);
            } catch (const std::invalid_argument& e) {
                throw ParseError(e.what(), line_no);
            }
        } else if (key == "fasttrack.enabled") {
            if (value == "true") {
                fast_track_enabled = true;
            } else if (value == "false") {
                fast_track_enabled = false;
            } else {
                throw bad("expected true or false");
            }
        } else if (key.starts_with("fasttrack.")) {
            const auto rest = key.substr(10);
            const auto dot = rest.find('.');
            if (dot == std::string_view::npos) throw bad("unknown key");
            const auto priority = detail::parse_int(rest.substr(0, dot));
            const auto field = rest.substr(dot + 1);
            if (!priority) throw bad("fast-track rule number must be an integer");
            auto& rule = fast_track[*priority];
            rule.priority = static_cast<int>(*priority);
            if (field == "cond") {
                auto cond = parse_fast_track_condition(value);
                if (!cond) throw bad("malformed condition");
                rule.e1_ne = cond->first;
                rule.e2_ne = cond->second;
                seen[*priority].first = true;
            } else if (field == "target") {
                auto label = parse_label(value);
                if (!label || *label == AttributeLabel::Other) throw bad("target must be a positive label");
                rule.target = *label;
                seen[*priority].second = true;
            } else {
                throw bad("unknown key");
            }
            fast_track_given = true;
        } else if (key == "svm.c") {
            options.svm.c = real();
        } else if (key == "svm.tol") {
            options.svm.tol = real();
        } else if (key == "svm.eps") {
            options.svm.eps = real();
        } else if (key == "svm.max_passes") {
            options.svm.max_passes = count();
        } else if (key == "keywords.min_frequency") {
            options.keywords.min_frequency = count();
        } else if (key == "keywords.top_k") {
            options.keywords.top_k_per_label = count();
        } else {
            throw bad("unknown key");
        }
    }

    if (fast_track_given) {
        options.hierarchy.fast_track.clear();
        for (const auto& [priority, rule] : fast_track) {
            if (!seen[priority].first || !seen[priority].second) {
                throw ParseError("fast-track rule " + std::to_string(priority) +
                                     " needs both cond and target",
                                 0);
            }
            options.hierarchy.fast_track.push_back(rule);
        }
    }
    if (!fast_track_enabled) options.hierarchy.fast_track.clear();
}

TrainedSystem train_system(std::span<const TaggedSentence> train, const RuleSet& rules,
                           const TrainingOptions& options) {
    const auto labeled = labeled_candidates(train);

    TrainedSystem system;
    system.keywords = select_keywords(labeled, options.keywords);
    if (options.rule_literals_as_keywords) add_rule_literals(system.keywords, rules, labeled);

    std::vector<LabeledVector> vectors;
    vectors.reserve(labeled.size());
    for (const auto& lc : labeled) {
        vectors.push_back({vectorize(lc.candidate, system.features, system.keywords), lc.label});
    }
    system.features.freeze();

    HierarchyTrainOptions hopts;
    hopts.svm = options.svm;
    hopts.dimension = system.features.size();
    hopts.threads = options.threads;
    hopts.on_binary_train = options.on_binary_train;
    system.hierarchy = train_hierarchy(vectors, options.hierarchy, hopts);
    return system;
}

std::string_view to_string(ExtractionMode mode) {
    switch (mode) {
        case ExtractionMode::Hybrid: return "hybrid";
        case ExtractionMode::TemplateOnly: return "template";
        case ExtractionMode::SvmOnly: return "svm";
    }
    return "hybrid";
}

namespace {

std::optional<AttributeLabel> svm_label(const TrainedSystem& system, const CandidateInstance& cand) {
    const auto x = vectorize(cand, system.features, system.keywords);
    const auto result = classify(system.hierarchy, cand, x);
    if (result.label == AttributeLabel::Other) return std::nullopt;
    return result.label;
}

std::optional<AttributeLabel> predict_one(const RuleSet& rules, const TrainedSystem* system,
                                          ExtractionMode mode, const CandidateInstance& cand) {
    switch (mode) {
        case ExtractionMode::TemplateOnly: return template_label(rules, cand);
        case ExtractionMode::SvmOnly: return svm_label(*system, cand);
        case ExtractionMode::Hybrid:
            if (auto label = template_label(rules, cand)) return label;
            return svm_label(*system, cand);
    }
    return std::nullopt;
}

}  // namespace

std::vector<Prediction> extract_svm(const TrainedSystem& system,
                                    std::span<const CandidateInstance> cands) {
    std::vector<Prediction> out;
    for (const auto& cand : cands) {
        if (auto label = svm_label(system, cand)) out.push_back({cand, *label});
    }
    return out;
}

std::vector<Prediction> extract_hybrid(const RuleSet& rules, const TrainedSystem& system,
                                       std::span<const CandidateInstance> cands) {
    std::vector<Prediction> out;
    for (const auto& cand : cands) {
        if (auto label = predict_one(rules, &system, ExtractionMode::Hybrid, cand)) {
            out.push_back({cand, *label});
        }
    }
    return out;
}

PredictionRecord to_record(const Prediction& p) {
    return {p.candidate.sentence->id, p.label, p.candidate.e1, p.candidate.e2};
}

std::vector<PredictionRecord> extract_corpus(std::span<const TaggedSentence> corpus,
                                             const RuleSet& rules, const TrainedSystem* system,
                                             ExtractionMode mode, unsigned threads) {
    if (mode != ExtractionMode::TemplateOnly && system == nullptr) {
        throw std::invalid_argument("SVM extraction needs a trained model");
    }
    std::vector<CandidateInstance> cands;
    for (const auto& s : corpus) {
        if (!passes_entity_filter(s)) continue;
        for (const auto& c : candidate_pairs(s)) cands.push_back(c);
    }

    std::vector<std::optional<AttributeLabel>> labels(cands.size());
    const auto work = [&](std::size_t i) { labels[i] = predict_one(rules, system, mode, cands[i]); };
    const unsigned workers =
        std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cands.size() / 64 + 1)));
    if (workers == 1) {
        for (std::size_t i = 0; i < cands.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < cands.size(); i = next++) work(i);
            });
        }
        for (auto& t : pool) t.join();
    }

    std::vector<PredictionRecord> out;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (labels[i]) out.push_back(to_record({cands[i], *labels[i]}));
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(a.sentence_id, a.e1, a.e2, a.label) <
               std::tie(b.sentence_id, b.e1, b.e2, b.label);
    });
    return out;
}

unsigned threads_from_env() {
    const char* env = std::getenv("ATTRFORGE_THREADS");
    if (env == nullptr) return 1;
    const auto n = detail::parse_size(env);
    if (!n || *n == 0) return 1;
    return static_cast<unsigned>(std::min<std::size_t>(*n, 256));
}

}  // namespace attrforge
