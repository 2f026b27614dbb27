#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "attrforge/corpus.hpp"
#include "attrforge/error.hpp"
#include "attrforge/eval.hpp"
#include "attrforge/hierarchy.hpp"
#include "attrforge/pipeline.hpp"
#include "attrforge/svm.hpp"
#include "attrforge/synthgen.hpp"
#include "attrforge/templates.hpp"

namespace py = pybind11;
using namespace attrforge;

namespace {

struct PyCorpus {
    Corpus sentences;
};

using Record = std::tuple<std::string, std::string, std::pair<std::size_t, std::size_t>,
                          std::pair<std::size_t, std::size_t>>;

Record to_tuple(const PredictionRecord& r) {
    return {r.sentence_id, std::string(to_string(r.label)), {r.e1.start, r.e1.end}, {r.e2.start, r.e2.end}};
}

PredictionRecord from_tuple(const Record& t) {
    const auto label = parse_label(std::get<1>(t));
    if (!label) throw py::value_error("unknown label '" + std::get<1>(t) + "'");
    const auto [a, b] = std::get<2>(t);
    const auto [c, d] = std::get<3>(t);
    return {std::get<0>(t), *label, {a, b}, {c, d}};
}

ExtractionMode parse_mode(const std::string& mode) {
    if (mode == "hybrid") return ExtractionMode::Hybrid;
    if (mode == "template") return ExtractionMode::TemplateOnly;
    if (mode == "svm") return ExtractionMode::SvmOnly;
    throw py::value_error("mode must be 'hybrid', 'template' or 'svm'");
}

RuleSet rules_from(const std::optional<std::string>& text) {
    return text ? parse_rules(*text) : bundled_rules();
}

py::dict report_dict(const EvalReport& report) {
    py::dict out;
    for (const auto& [label, c] : report.per_category) {
        py::dict row;
        row["total"] = c.total;
        row["identified"] = c.identified;
        row["correct"] = c.correct;
        row["precision"] = c.precision();
        row["recall"] = c.recall();
        row["f1"] = c.f1();
        out[py::str(std::string(to_string(label)))] = row;
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_attrforge, m) {
    m.doc() = "Person-attribute extraction: templates plus a hierarchical linear SVM.";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ModelFormatError>(m, "ModelFormatError", PyExc_ValueError);
    py::register_exception<DataError>(m, "DataError", PyExc_ValueError);

    py::class_<PyCorpus>(m, "Corpus")
        .def(py::init([](const std::string& text) { return PyCorpus{parse_corpus(text)}; }), py::arg("text"),
             "Parse the tab-separated column format.")
        .def_static("synthetic",
                    [](std::uint64_t seed, std::size_t n, double noise, std::size_t vocab, bool ascii) {
                        GenParams p;
                        p.seed = seed;
                        p.n_sentences = n;
                        p.noise = noise;
                        p.vocab_size = vocab;
                        p.script = ascii ? SurfaceScript::Ascii : SurfaceScript::Tibetan;
                        p.validate();
                        return PyCorpus{generate_corpus(p)};
                    },
                    py::arg("seed") = 42, py::arg("n_sentences") = 2400, py::arg("noise") = 0.2,
                    py::arg("vocab_size") = 400, py::arg("ascii") = false)
        .def("__len__", [](const PyCorpus& c) { return c.sentences.size(); })
        .def_property_readonly("ids", [](const PyCorpus& c) {
            std::vector<std::string> ids;
            for (const auto& s : c.sentences) ids.push_back(s.id);
            return ids;
        })
        .def("render", [](const PyCorpus& c) { return render_corpus(c.sentences); })
        .def("split",
             [](const PyCorpus& c, std::int64_t num, std::int64_t den, std::uint64_t seed) {
                 auto parts = split_corpus(c.sentences, {num, den}, seed);
                 return std::pair{PyCorpus{std::move(parts.train)}, PyCorpus{std::move(parts.test)}};
             },
             py::arg("numerator") = 2, py::arg("denominator") = 3, py::arg("seed") = 42,
             "Shuffle and split into (train, test).")
        .def("candidates", [](const PyCorpus& c) {
            std::vector<std::tuple<std::string, std::pair<std::size_t, std::size_t>,
                                   std::pair<std::size_t, std::size_t>, std::string>>
                out;
            for (const auto& lc : labeled_candidates(c.sentences)) {
                out.push_back({lc.candidate.sentence->id,
                               {lc.candidate.e1.start, lc.candidate.e1.end},
                               {lc.candidate.e2.start, lc.candidate.e2.end},
                               std::string(to_string(lc.label))});
            }
            return out;
        }, "(sentence id, e1, e2, gold label) for every filtered candidate pair.");

    py::class_<TrainedSystem>(m, "Model")
        .def_static("loads", [](const std::string& bytes) { return deserialize_model(bytes); })
        .def("dumps", [](const TrainedSystem& s) { return serialize_model(s); })
        .def_property_readonly("n_features", [](const TrainedSystem& s) { return s.features.size(); })
        .def_property_readonly("n_keywords", [](const TrainedSystem& s) { return s.keywords.size(); })
        .def_property_readonly("n_classifiers",
                               [](const TrainedSystem& s) { return classifier_count(s.hierarchy.config); })
        .def("__eq__", [](const TrainedSystem& a, const TrainedSystem& b) { return a == b; });

    m.def("train",
          [](const PyCorpus& corpus, const std::optional<std::string>& config,
             const std::optional<std::string>& rules, unsigned threads) {
              TrainingOptions options;
              options.threads = threads;
              if (config) apply_config(options, *config);
              const RuleSet rule_set = rules_from(rules);
              py::gil_scoped_release release;
              return train_system(corpus.sentences, rule_set, options);
          },
          py::arg("corpus"), py::arg("config") = py::none(), py::arg("rules") = py::none(),
          py::arg("threads") = 1, "Train keywords, features and the SVM hierarchy.");

    m.def("extract",
          [](const PyCorpus& corpus, const TrainedSystem* model, const std::string& mode,
             const std::optional<std::string>& rules, unsigned threads) {
              const RuleSet rule_set = rules_from(rules);
              const auto m = parse_mode(mode);
              std::vector<PredictionRecord> records;
              {
                  py::gil_scoped_release release;
                  records = extract_corpus(corpus.sentences, rule_set, model, m, threads);
              }
              std::vector<Record> out;
              for (const auto& r : records) out.push_back(to_tuple(r));
              return out;
          },
          py::arg("corpus"), py::arg("model") = nullptr, py::arg("mode") = "hybrid",
          py::arg("rules") = py::none(), py::arg("threads") = 1,
          "Predictions as (sentence id, label, e1, e2) with half-open token spans.");

    m.def("evaluate",
          [](const std::vector<Record>& predictions, const PyCorpus& gold) {
              std::vector<PredictionRecord> records;
              for (const auto& p : predictions) records.push_back(from_tuple(p));
              return report_dict(score(records, gold.sentences));
          },
          py::arg("predictions"), py::arg("gold"));

    m.def("render_report",
          [](const std::map<std::string, std::tuple<std::size_t, std::size_t, std::size_t>>& counts) {
              EvalReport report;
              for (const auto& [name, c] : counts) {
                  const auto label = parse_label(name);
                  if (!label || *label == AttributeLabel::Other) throw py::value_error("bad label " + name);
                  report.per_category[*label] = {std::get<0>(c), std::get<1>(c), std::get<2>(c)};
              }
              return render_report(report);
          },
          py::arg("counts"), "Table for {label: (total, identified, correct)}.");

    m.def("train_svm",
          [](const std::vector<std::vector<double>>& xs, const std::vector<int>& ys, double c, double tol) {
              std::vector<SparseVector> sparse;
              std::size_t dim = 0;
              for (const auto& x : xs) {
                  sparse.push_back(SparseVector::from_dense(x));
                  dim = std::max(dim, x.size());
              }
              SvmParams params;
              params.c = c;
              params.tol = tol;
              const auto sol = solve_smo(sparse, ys, params, dim);
              py::dict out;
              out["weights"] = sol.model.weights;
              out["bias"] = sol.model.bias;
              out["alphas"] = sol.alphas;
              out["objective"] = dual_objective(sol.alphas, sparse, ys);
              out["kkt_violations"] = check_kkt(sol.model, sol.alphas, sparse, ys, tol).size();
              return out;
          },
          py::arg("xs"), py::arg("ys"), py::arg("c") = 1.0, py::arg("tol") = 1e-3,
          "Train a linear soft-margin SVM on dense rows.");

    m.def("classifier_count",
          [](const std::vector<std::size_t>& arities) { return classifier_count(arities); },
          py::arg("arities"));

    m.def("bundled_rules", [] { return std::string(bundled_rules_text()); });
    m.def("generate",
          [](std::uint64_t seed, std::size_t n, double noise) {
              GenParams p;
              p.seed = seed;
              p.n_sentences = n;
              p.noise = noise;
              p.validate();
              return generate(p);
          },
          py::arg("seed") = 42, py::arg("n_sentences") = 2400, py::arg("noise") = 0.2);

#ifdef ATTRFORGE_VERSION
    m.attr("__version__") = ATTRFORGE_VERSION;
#else
    m.attr("__version__") = "dev";
#endif
}
