#include "attrforge/hierarchy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>
#include <thread>

#include "text_util.hpp"

namespace attrforge {

std::optional<std::pair<std::optional<NeTag>, std::optional<NeTag>>> parse_fast_track_condition(
    std::string_view text) {
    std::pair<std::optional<NeTag>, std::optional<NeTag>> cond;
    bool any = false;
    for (auto clause : detail::split(text, '&')) {
        clause = detail::trim(clause);
        const auto eq = clause.find('=');
        if (eq == std::string_view::npos) return std::nullopt;
        const auto slot = detail::trim(clause.substr(0, eq));
        const auto tag = parse_ne_tag(detail::trim(clause.substr(eq + 1)));
        if (!tag || *tag == NeTag::O) return std::nullopt;
        if (slot == "e1" && !cond.first) {
            cond.first = tag;
        } else if (slot == "e2" && !cond.second) {
            cond.second = tag;
        } else {
            return std::nullopt;
        }
        any = true;
    }
    if (!any) return std::nullopt;
    return cond;
}

std::string format_fast_track_condition(const FastTrackRule& rule) {
    std::string out;
    if (rule.e1_ne) out += "e1=" + std::string(to_string(*rule.e1_ne));
    if (rule.e2_ne) {
        if (!out.empty()) out += '&';
        out += "e2=" + std::string(to_string(*rule.e2_ne));
    }
    return out;
}

HierarchyConfig HierarchyConfig::default_config() {
    HierarchyConfig config = flat();
    config.layers.insert(config.layers.begin(),
                         HierarchyNode{{std::string(kRelevantCategory), "Other"}});
    config.fast_track.push_back({1, std::nullopt, NeTag::Time, AttributeLabel::BirthDate});
    return config;
}

HierarchyConfig HierarchyConfig::flat() {
    HierarchyConfig config;
    HierarchyNode leaf;
    for (auto label : kPositiveLabels) leaf.categories.emplace_back(to_string(label));
    config.layers.push_back(std::move(leaf));
    return config;
}

bool HierarchyConfig::has_relevance_layer() const {
    return layers.size() > 1;
}

std::vector<AttributeLabel> HierarchyConfig::leaf_labels() const {
    std::vector<AttributeLabel> labels;
    if (layers.empty()) return labels;
    for (const auto& name : layers.back().categories) {
        if (auto label = parse_label(name)) labels.push_back(*label);
    }
    std::sort(labels.begin(), labels.end());
    return labels;
}

void HierarchyConfig::validate() const {
    if (layers.empty()) throw std::invalid_argument("hierarchy has no layers");
    if (layers.size() > 2) {
        throw std::invalid_argument("supported topologies: [relevance] leaf");
    }
    if (layers.size() == 2) {
        auto cats = layers[0].categories;
        std::sort(cats.begin(), cats.end());
        if (cats != std::vector<std::string>{"Other", std::string(kRelevantCategory)}) {
            throw std::invalid_argument("non-leaf layer must be {Relevant,Other}");
        }
    }
    std::set<AttributeLabel> seen;
    for (const auto& name : layers.back().categories) {
        const auto label = parse_label(name);
        if (!label || *label == AttributeLabel::Other) {
            throw std::invalid_argument("leaf category '" + name + "' is not a positive label");
        }
        if (!seen.insert(*label).second) {
            throw std::invalid_argument("duplicate leaf category '" + name + "'");
        }
    }
    if (seen.size() < 2) throw std::invalid_argument("leaf needs at least two labels");
    for (const auto& rule : fast_track) {
        if (rule.target == AttributeLabel::Other) {
            throw std::invalid_argument("fast-track target may not be Other");
        }
        if (!rule.e1_ne && !rule.e2_ne) throw std::invalid_argument("fast-track rule has no condition");
    }
}

std::string HierarchyConfig::format_layers() const {
    std::string out;
    for (const auto& node : layers) {
        if (!out.empty()) out += ' ';
        out += '{';
        for (std::size_t i = 0; i < node.categories.size(); ++i) {
            if (i) out += ',';
            out += node.categories[i];
        }
        out += '}';
    }
    return out;
}

std::vector<HierarchyNode> HierarchyConfig::parse_layers(std::string_view text) {
    std::vector<HierarchyNode> layers;
    std::size_t i = 0;
    while (i < text.size()) {
        if (detail::is_space(text[i])) {
            ++i;
            continue;
        }
        if (text[i] != '{') throw std::invalid_argument("expected '{' in hierarchy layers");
        const auto close = text.find('}', i);
        if (close == std::string_view::npos) throw std::invalid_argument("unterminated '{'");
        HierarchyNode node;
        for (auto cat : detail::split(text.substr(i + 1, close - i - 1), ',')) {
            cat = detail::trim(cat);
            if (cat.empty()) throw std::invalid_argument("empty category in hierarchy layers");
            node.categories.emplace_back(cat);
        }
        layers.push_back(std::move(node));
        i = close + 1;
    }
    return layers;
}

std::size_t classifier_count(std::span<const std::size_t> node_arities) {
    std::size_t total = 0;
    for (std::size_t p : node_arities) total += p * (p > 0 ? p - 1 : 0) / 2;
    return total;
}

std::size_t classifier_count(const HierarchyConfig& config) {
    std::vector<std::size_t> arities;
    for (const auto& node : config.layers) arities.push_back(node.arity());
    return classifier_count(arities);
}

std::optional<AttributeLabel> apply_fast_track(std::span<const FastTrackRule> rules,
                                               const CandidateInstance& cand) {
    std::vector<const FastTrackRule*> ordered;
    for (const auto& r : rules) ordered.push_back(&r);
    std::stable_sort(ordered.begin(), ordered.end(),
                     [](const auto* a, const auto* b) { return a->priority < b->priority; });
    for (const auto* r : ordered) {
        if (r->e1_ne && cand.e1_ne() != *r->e1_ne) continue;
        if (r->e2_ne && cand.e2_ne() != *r->e2_ne) continue;
        return r->target;
    }
    return std::nullopt;
}

namespace {

struct Job {
    BinaryTask task;
    std::vector<SparseVector> xs;
    std::vector<int> ys;
    SvmModel* out = nullptr;
};

}  // namespace

HierarchyModel train_hierarchy(std::span<const LabeledVector> train, const HierarchyConfig& config,
                               const HierarchyTrainOptions& options) {
    config.validate();
    options.svm.validate();
    const auto leaf = config.leaf_labels();

    std::map<AttributeLabel, std::size_t> counts;
    for (const auto& lv : train) ++counts[lv.label];
    for (auto label : leaf) {
        if (counts[label] == 0) {
            throw std::invalid_argument("no training instances for label " +
                                        std::string(to_string(label)));
        }
    }
    if (config.has_relevance_layer() && counts[AttributeLabel::Other] == 0) {
        throw std::invalid_argument("no training instances for label Other");
    }

    std::size_t dimension = options.dimension;
    for (const auto& lv : train) {
        if (!lv.x.columns.empty()) {
            dimension = std::max<std::size_t>(dimension, lv.x.columns.back() + 1);
        }
    }

    HierarchyModel model;
    model.config = config;
    std::vector<Job> jobs;

    if (config.has_relevance_layer()) {
        model.relevance.emplace();
        Job job;
        job.task.node = "relevance";
        for (const auto& lv : train) {
            const bool positive = std::find(leaf.begin(), leaf.end(), lv.label) != leaf.end();
            if (!positive && lv.label != AttributeLabel::Other) continue;
            job.xs.push_back(lv.x);
            job.ys.push_back(positive ? 1 : -1);
            (positive ? job.task.positives : job.task.negatives)++;
        }
        job.out = &*model.relevance;
        jobs.push_back(std::move(job));
    }
    for (std::size_t a = 0; a < leaf.size(); ++a) {
        for (std::size_t b = a + 1; b < leaf.size(); ++b) {
            const LabelPair pair{leaf[a], leaf[b]};
            Job job;
            job.task.node = std::string(to_string(pair.first)) + "/" + std::string(to_string(pair.second));
            for (const auto& lv : train) {
                if (lv.label != pair.first && lv.label != pair.second) continue;
                job.xs.push_back(lv.x);
                job.ys.push_back(lv.label == pair.first ? 1 : -1);
                (lv.label == pair.first ? job.task.positives : job.task.negatives)++;
            }
            job.out = &model.pairwise[pair];
            jobs.push_back(std::move(job));
        }
    }

    const auto run = [&](Job& job) {
        if (options.on_binary_train) options.on_binary_train(job.task);
        *job.out = train_binary(job.xs, job.ys, options.svm, dimension);
    };

    const unsigned workers = std::max(1u, std::min<unsigned>(options.threads, jobs.size()));
    if (workers == 1) {
        for (auto& job : jobs) run(job);
        return model;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs.size());
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < jobs.size(); i = next++) {
                try {
                    run(jobs[i]);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return model;
}

Classification leaf_vote(const HierarchyModel& model, const SparseVector& x) {
    const auto leaf = model.config.leaf_labels();
    std::map<AttributeLabel, std::size_t> votes;
    std::map<AttributeLabel, double> weight;
    for (const auto& [pair, svm] : model.pairwise) {
        const double value = decision_value(svm, x);
        const AttributeLabel winner = value > 0.0 ? pair.first : pair.second;
        ++votes[winner];
        weight[winner] += std::min(std::abs(value), 1.0);
    }
    Classification best{leaf.front(), -1.0, false};
    std::size_t best_votes = 0;
    bool first = true;
    for (auto label : leaf) {
        const std::size_t v = votes[label];
        const double w = weight[label];
        if (first || v > best_votes || (v == best_votes && w > best.score)) {
            best = {label, w, false};
            best_votes = v;
            first = false;
        }
    }
    return best;
}

Classification classify(const HierarchyModel& model, const CandidateInstance& cand,
                        const SparseVector& x) {
    if (auto label = apply_fast_track(model.config.fast_track, cand)) {
        return {*label, std::numeric_limits<double>::infinity(), true};
    }
    if (model.relevance) {
        const double value = decision_value(*model.relevance, x);
        if (value < 0.0) return {AttributeLabel::Other, value, false};
    }
    return leaf_vote(model, x);
}

}  // namespace attrforge
