// Acceptance checks: one PASS/FAIL line per criterion; exit status 1 if any fail.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "attrforge/corpus.hpp"
#include "attrforge/eval.hpp"
#include "attrforge/hierarchy.hpp"
#include "attrforge/pipeline.hpp"
#include "attrforge/svm.hpp"
#include "attrforge/synthgen.hpp"
#include "attrforge/templates.hpp"
#include "qp_oracle.hpp"
#include "reference_tables.hpp"
#include "svm_datasets.hpp"

using namespace attrforge;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;
std::map<int, std::string> lines;

void report(int id, const char* name, bool ok, const std::string& detail) {
    lines[id] = std::string(ok ? "[PASS] " : "[FAIL] ") + std::to_string(id) + " " + name + ": " + detail;
    if (!ok) ++failures;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof(buf), f, args...);
    return buf;
}

// Shared state for the pipeline criteria.
struct Experiment {
    Corpus train;
    Corpus test;
    TrainedSystem system;
    std::map<ExtractionMode, std::vector<PredictionRecord>> predictions;
    std::map<ExtractionMode, EvalReport> reports;
};

std::vector<CandidateInstance> filtered_candidates(const Corpus& corpus) {
    std::vector<CandidateInstance> out;
    for (const auto& s : corpus) {
        if (!passes_entity_filter(s)) continue;
        for (const auto& c : candidate_pairs(s)) out.push_back(c);
    }
    return out;
}

void metric_reproduction() {
    const auto start = Clock::now();
    std::size_t matched = 0;
    std::size_t values = 0;
    double worst = 0.0;
    for (const auto& table : testing::kReferenceTables) {
        const auto data = testing::realize(table);
        const auto text = render_report(score(data.predictions, data.gold));
        std::istringstream in(text);
        std::string line;
        std::getline(in, line);
        for (const auto& row : table) {
            std::getline(in, line);
            std::istringstream fields(line);
            std::string label;
            std::size_t t = 0, i = 0, c = 0;
            double p = 0, r = 0, f1 = 0;
            fields >> label >> t >> i >> c >> p >> r >> f1;
            for (auto [got, want] : {std::pair{p, row.p}, std::pair{r, row.r}, std::pair{f1, row.f1}}) {
                ++values;
                const double err = std::abs(got - want);
                worst = std::max(worst, err);
                if (label == to_string(row.label) && err <= 0.01 + 1e-9) ++matched;
            }
        }
    }
    const double elapsed = seconds_since(start);
    report(1, "metric reproduction", values == 36 && matched == 36 && elapsed < 1.0,
           fmt("%zu/%zu percentages within 0.01 (max error %.4f), %.3f s", matched, values, worst, elapsed));
}

void svm_oracle() {
    const auto start = Clock::now();
    const auto sets = testing::small_datasets(64, 2024);
    std::size_t agree = 0;
    std::size_t clean = 0;
    double worst = 0.0;
    bool analytic = false;
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const auto& ds = sets[k];
        const auto xs = ds.sparse();
        SvmParams params;
        params.c = ds.c;
        params.tol = 1e-6;
        const auto sol = solve_smo(xs, ds.labels, params, ds.dimension());
        const auto ref = oracle::solve_dual(ds.points, ds.labels, ds.c);
        const double rel = std::abs(dual_objective(sol.alphas, xs, ds.labels) - ref.objective) /
                           std::abs(ref.objective);
        worst = std::max(worst, rel);
        if (rel <= 1e-6) ++agree;
        if (check_kkt(sol.model, sol.alphas, xs, ds.labels, 1e-3).empty()) ++clean;
        if (k == 0) {
            const auto& w = sol.model.weights;
            analytic = std::abs(w[0] - 0.5) < 1e-6 && std::abs(w[1] - 0.5) < 1e-6 &&
                       std::abs(sol.model.bias + 1.0) < 1e-6;
        }
    }
    const double elapsed = seconds_since(start);
    const bool ok = sets.size() >= 50 && agree == sets.size() && clean == sets.size() && analytic &&
                    elapsed < 10.0;
    report(2, "SVM oracle equivalence", ok,
           fmt("%zu datasets, objective agreement %zu (max rel error %.2e), KKT-clean at 1e-3 %zu, "
               "analytic w=(0.5,0.5) b=-1 %s, %.3f s",
               sets.size(), agree, worst, clean, analytic ? "yes" : "no", elapsed));
}

void cascade_equivalence() {
    const auto corpus = generate_corpus(GenParams{.seed = 314});
    const auto split = split_corpus(corpus, {2, 3}, 314);
    const auto labeled = labeled_candidates(split.train);
    const auto keywords = select_keywords(labeled);
    FeatureMap map;
    std::vector<LabeledVector> vectors;
    for (const auto& lc : labeled) vectors.push_back({vectorize(lc.candidate, map, keywords), lc.label});
    map.freeze();

    HierarchyConfig config = HierarchyConfig::flat();
    config.fast_track.clear();
    HierarchyTrainOptions opts;
    opts.dimension = map.size();
    const auto model = train_hierarchy(vectors, config, opts);

    // Flat one-vs-one built directly from binary SVMs.
    const std::array<AttributeLabel, 4> labels = {AttributeLabel::BirthDate, AttributeLabel::BirthPlace,
                                                  AttributeLabel::Father, AttributeLabel::Mother};
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, SvmModel>> pairs;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
            std::vector<SparseVector> xs;
            std::vector<int> ys;
            for (const auto& lv : vectors) {
                if (lv.label == labels[a] || lv.label == labels[b]) {
                    xs.push_back(lv.x);
                    ys.push_back(lv.label == labels[a] ? 1 : -1);
                }
            }
            pairs.push_back({{a, b}, train_binary(xs, ys, SvmParams{}, map.size())});
        }
    }
    const auto flat_predict = [&](const SparseVector& x) {
        std::array<int, 4> wins{};
        std::array<double, 4> margin{};
        for (const auto& [ab, svm] : pairs) {
            const double v = decision_value(svm, x);
            const std::size_t w = v > 0 ? ab.first : ab.second;
            ++wins[w];
            margin[w] += std::min(std::abs(v), 1.0);
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < 4; ++c) {
            if (wins[c] > wins[best] || (wins[c] == wins[best] && margin[c] > margin[best])) best = c;
        }
        return labels[best];
    };

    std::size_t total = 0;
    std::size_t agree = 0;
    for (const auto& cand : filtered_candidates(split.test)) {
        const auto x = vectorize(cand, std::as_const(map), keywords);
        ++total;
        if (classify(model, cand, x).label == flat_predict(x)) ++agree;
    }
    report(3, "cascade equivalence", total >= 1000 && agree == total,
           fmt("%zu/%zu candidates agree with the flat one-vs-one classifier", agree, total));
}

void classifier_count_law(const Experiment& ex) {
    const auto labeled = labeled_candidates(ex.train);
    std::vector<LabeledVector> vectors;
    for (const auto& lc : labeled) {
        vectors.push_back({vectorize(lc.candidate, ex.system.features, ex.system.keywords), lc.label});
    }
    std::array<std::size_t, 2> trained{};
    std::array<std::size_t, 2> expected{};
    const std::array<HierarchyConfig, 2> configs = {HierarchyConfig::flat(), HierarchyConfig::default_config()};
    for (std::size_t k = 0; k < 2; ++k) {
        std::mutex m;
        HierarchyTrainOptions opts;
        opts.dimension = ex.system.features.size();
        opts.threads = 2;
        opts.on_binary_train = [&](const BinaryTask&) {
            std::lock_guard lock(m);
            ++trained[k];
        };
        train_hierarchy(vectors, configs[k], opts);
        expected[k] = classifier_count(configs[k]);
    }
    const bool ok = expected[0] == 6 && expected[1] == 7 && trained == expected;
    report(4, "classifier-count law", ok,
           fmt("classifier_count flat=%zu default=%zu; binary trainings flat=%zu default=%zu", expected[0],
               expected[1], trained[0], trained[1]));
}

Experiment method_ordering() {
    const auto start = Clock::now();
    Experiment ex;
    const auto corpus = generate_corpus(GenParams{.seed = 42, .n_sentences = 2400, .noise = 0.2});
    auto split = split_corpus(corpus, {2, 3}, 42);
    ex.train = std::move(split.train);
    ex.test = std::move(split.test);
    ex.system = train_system(ex.train, bundled_rules(), TrainingOptions{});
    for (auto mode : {ExtractionMode::TemplateOnly, ExtractionMode::SvmOnly, ExtractionMode::Hybrid}) {
        ex.predictions[mode] = extract_corpus(ex.test, bundled_rules(), &ex.system, mode);
        ex.reports[mode] = score(ex.predictions[mode], ex.test);
    }
    const double elapsed = seconds_since(start);

    bool ok = elapsed < 60.0;
    std::string detail;
    for (auto label : kPositiveLabels) {
        const auto f1 = [&](ExtractionMode m) { return format_f1(ex.reports[m].per_category[label]); };
        const auto frac = [&](ExtractionMode m) {
            const auto& c = ex.reports[m].per_category[label];
            return std::pair{2 * c.correct, c.identified + c.total};
        };
        // Exact rational comparison of 2c/(i+t).
        const auto geq = [&](ExtractionMode a, ExtractionMode b) {
            const auto [na, da] = frac(a);
            const auto [nb, db] = frac(b);
            return na * db >= nb * da;
        };
        const bool row = geq(ExtractionMode::Hybrid, ExtractionMode::TemplateOnly) &&
                         geq(ExtractionMode::Hybrid, ExtractionMode::SvmOnly);
        ok = ok && row;
        detail += fmt("%s hybrid %s / template %s / svm %s%s; ", std::string(to_string(label)).c_str(),
                      f1(ExtractionMode::Hybrid).c_str(), f1(ExtractionMode::TemplateOnly).c_str(),
                      f1(ExtractionMode::SvmOnly).c_str(), row ? "" : " (violated)");
    }
    detail += fmt("%.1f s", elapsed);
    report(5, "method ordering", ok, detail);
    return ex;
}

void determinism(const Experiment& ex) {
    std::vector<std::string> problems;

    const GenParams gen{.seed = 42};
    const auto text = generate(gen);
    if (generate(gen) != text) problems.push_back("generator");
    if (render_corpus(parse_corpus(text)) != text) problems.push_back("corpus round trip");

    const auto bytes = serialize_model(ex.system);
    const auto back = deserialize_model(bytes);
    if (!(back == ex.system) || serialize_model(back) != bytes) problems.push_back("model round trip");

    const auto retrained = train_system(ex.train, bundled_rules(), TrainingOptions{});
    if (serialize_model(retrained) != bytes) problems.push_back("retrained model");
    for (const auto& [mode, preds] : ex.predictions) {
        const auto again = extract_corpus(ex.test, bundled_rules(), &retrained, mode, 4);
        if (write_predictions(again) != write_predictions(preds)) {
            problems.push_back("predictions (" + std::string(to_string(mode)) + ")");
        }
    }

    const auto clean = generate_corpus(GenParams{.seed = 42, .noise = 0.0});
    const auto report_clean = score(extract_corpus(clean, bundled_rules(), nullptr, ExtractionMode::TemplateOnly), clean);
    std::string precisions;
    for (auto label : kPositiveLabels) {
        const auto& c = report_clean.per_category.at(label);
        precisions += " " + format_precision(c);
        if (c.identified == 0 || c.correct != c.identified) {
            problems.push_back("noise-0 precision " + std::string(to_string(label)));
        }
    }

    std::string detail = problems.empty() ? "corpus, model and train+extract outputs byte-identical"
                                          : "mismatch:";
    for (const auto& p : problems) detail += " " + p;
    detail += "; noise-0 template precision" + precisions;
    report(6, "determinism and round trips", problems.empty(), detail);
}

void filter_and_fast_track(const Experiment& ex) {
    // Synthetic test sentences plus random sentences, some entity-free.
    Corpus corpus = ex.test;
    std::mt19937_64 rng(7);
    const NeTag tags[] = {NeTag::Per, NeTag::Loc, NeTag::Time, NeTag::O, NeTag::O, NeTag::O};
    std::size_t entity_free = 0;
    for (int i = 0; i < 400; ++i) {
        TaggedSentence s;
        s.id = "rand" + std::to_string(i);
        const std::size_t n = 1 + rng() % 10;
        const bool empty = i % 4 == 0;
        for (std::size_t t = 0; t < n; ++t) {
            s.tokens.push_back({"w" + std::to_string(rng() % 50), "n", empty ? NeTag::O : tags[rng() % 6]});
        }
        entity_free += empty;
        corpus.push_back(std::move(s));
    }

    std::size_t leaked = 0;
    for (const auto& s : corpus) {
        bool any_entity = false;
        for (const auto& t : s.tokens) any_entity = any_entity || t.ne != NeTag::O;
        if (any_entity) continue;
        const std::vector<TaggedSentence> one = {s};
        leaked += candidate_pairs(s).size() + labeled_candidates(one).size();
        for (auto mode : {ExtractionMode::Hybrid, ExtractionMode::SvmOnly, ExtractionMode::TemplateOnly}) {
            leaked += extract_corpus(one, bundled_rules(), &ex.system, mode).size();
        }
    }

    std::size_t time_total = 0;
    std::size_t time_ok = 0;
    for (const auto& cand : filtered_candidates(corpus)) {
        if (cand.e2_ne() != NeTag::Time) continue;
        ++time_total;
        const auto x = vectorize(cand, ex.system.features, ex.system.keywords);
        const auto result = classify(ex.system.hierarchy, cand, x);
        if (result.label == AttributeLabel::BirthDate && result.fast_tracked) ++time_ok;
    }
    std::size_t time_records = 0;
    std::size_t time_records_ok = 0;
    for (auto mode : {ExtractionMode::Hybrid, ExtractionMode::SvmOnly}) {
        std::map<std::string, const TaggedSentence*> by_id;
        for (const auto& s : corpus) by_id[s.id] = &s;
        const auto preds = extract_corpus(corpus, bundled_rules(), &ex.system, mode);
        for (const auto& p : preds) {
            if (by_id.at(p.sentence_id)->tokens[p.e2.start].ne != NeTag::Time) continue;
            ++time_records;
            time_records_ok += p.label == AttributeLabel::BirthDate;
        }
    }
    const bool ok = entity_free > 0 && leaked == 0 && time_total > 0 && time_ok == time_total &&
                    time_records == 2 * time_total && time_records_ok == time_records;
    report(7, "filter and fast track", ok,
           fmt("%zu entity-free sentences yield %zu candidates; %zu/%zu TIME candidates labeled BirthDate "
               "(%zu/%zu extracted records)",
               entity_free, leaked, time_ok, time_total, time_records_ok, time_records));
}

}  // namespace

int main() {
    metric_reproduction();
    svm_oracle();
    cascade_equivalence();
    const auto ex = method_ordering();
    classifier_count_law(ex);
    determinism(ex);
    filter_and_fast_track(ex);
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("%s\n", failures == 0 ? "all acceptance criteria passed"
                                      : (std::to_string(failures) + " acceptance criteria failed").c_str());
    return failures == 0 ? 0 : 1;
}
