// attrforge: person-attribute extraction from tagged sentences.
//
// Exit codes: 0 success, 1 usage error, 2 data error.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "attrforge/case_markers.hpp"
#include "attrforge/corpus.hpp"
#include "attrforge/error.hpp"
#include "attrforge/eval.hpp"
#include "attrforge/pipeline.hpp"
#include "attrforge/synthgen.hpp"
#include "attrforge/templates.hpp"

namespace {

using namespace attrforge;

constexpr int kUsageError = 1;
constexpr int kDataError = 2;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << content;
    if (!out) throw DataError("error writing '" + path + "'");
}

Corpus load_corpus(const std::string& path) {
    try {
        return parse_corpus(read_file(path));
    } catch (const ParseError& e) {
        throw DataError(path + ": " + e.what());
    }
}

struct RuleOptions {
    std::string rules_path;
    std::string lexicon_path;
};

RuleSet load_rules(const RuleOptions& opts) {
    CaseMarkerLexicon lexicon = CaseMarkerLexicon::bundled();
    if (!opts.lexicon_path.empty()) {
        try {
            lexicon = CaseMarkerLexicon::parse(read_file(opts.lexicon_path));
        } catch (const ParseError& e) {
            throw DataError(opts.lexicon_path + ": " + e.what());
        }
    }
    const std::string text = opts.rules_path.empty() ? std::string(bundled_rules_text())
                                                     : read_file(opts.rules_path);
    try {
        return parse_rules(text, std::move(lexicon));
    } catch (const ParseError& e) {
        throw DataError((opts.rules_path.empty() ? std::string("bundled rules") : opts.rules_path) +
                        ": " + e.what());
    }
}

void add_rule_options(CLI::App* cmd, RuleOptions& opts) {
    cmd->add_option("--rules", opts.rules_path, "Template rule file (default: bundled rules)")
        ->check(CLI::ExistingFile);
    cmd->add_option("--lexicon", opts.lexicon_path, "Case-marker lexicon (default: bundled)")
        ->check(CLI::ExistingFile);
}

std::string report_text(const EvalReport& report, bool tsv) {
    return tsv ? render_report_tsv(report) : render_report(report);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"attrforge: template + hierarchical SVM person-attribute extraction"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Show help for all subcommands");

    // ingest
    std::string ingest_path;
    auto* ingest = app.add_subcommand("ingest", "Validate a corpus and print statistics");
    ingest->add_option("corpus", ingest_path, "Corpus file")->required();

    // synth
    GenParams gen;
    std::string synth_out = "-";
    bool synth_ascii = false;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic tagged corpus");
    synth->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    synth->add_option("--n", gen.n_sentences, "Number of sentences")->capture_default_str();
    synth->add_option("--noise", gen.noise, "Fraction of perturbed sentences")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    synth->add_option("--vocab", gen.vocab_size, "Synthetic vocabulary size")->capture_default_str();
    synth->add_flag("--ascii", synth_ascii, "Use ASCII surfaces for synthetic words");
    synth->add_option("-o,--output", synth_out, "Output file ('-' for stdout)");

    // split
    std::string split_path;
    std::string split_fraction = "2/3";
    std::uint64_t split_seed = 42;
    std::string split_train;
    std::string split_test;
    auto* split = app.add_subcommand("split", "Shuffle and split a corpus into train/test");
    split->add_option("corpus", split_path, "Corpus file")->required();
    split->add_option("--fraction", split_fraction, "Training fraction p/q")->capture_default_str();
    split->add_option("--seed", split_seed, "Shuffle seed")->capture_default_str();
    split->add_option("--train-out", split_train, "Training partition output")->required();
    split->add_option("--test-out", split_test, "Test partition output")->required();

    // match
    std::string match_path;
    std::string match_out;
    bool match_tsv = false;
    RuleOptions match_rules;
    auto* match = app.add_subcommand("match", "Template-only extraction with a report against gold");
    match->add_option("corpus", match_path, "Corpus file with gold annotations")->required();
    add_rule_options(match, match_rules);
    match->add_option("-o,--output", match_out, "Also write predictions to this file");
    match->add_flag("--tsv", match_tsv, "Machine-readable report");

    // train
    std::string train_path;
    std::string train_out;
    std::string train_config;
    RuleOptions train_rules;
    std::optional<double> train_c;
    std::optional<double> train_tol;
    std::optional<std::size_t> train_passes;
    std::optional<std::size_t> train_min_freq;
    std::optional<std::size_t> train_top_k;
    bool train_no_fast_track = false;
    auto* train = app.add_subcommand("train", "Train the hierarchical SVM and write a model file");
    train->add_option("corpus", train_path, "Training corpus")->required();
    train->add_option("-o,--output", train_out, "Model file")->required();
    train->add_option("--config", train_config, "key = value config file")->check(CLI::ExistingFile);
    add_rule_options(train, train_rules);
    train->add_option("--c", train_c, "SVM soft-margin penalty");
    train->add_option("--tol", train_tol, "SMO KKT tolerance");
    train->add_option("--max-passes", train_passes, "SMO passes without progress before stopping");
    train->add_option("--min-frequency", train_min_freq, "Keyword minimum frequency");
    train->add_option("--top-k", train_top_k, "Keywords kept per label");
    train->add_flag("--no-fast-track", train_no_fast_track, "Disable fast-track rules");

    // extract
    std::string extract_path;
    std::string extract_model;
    std::string extract_out = "-";
    RuleOptions extract_rules;
    bool svm_only = false;
    bool template_only = false;
    auto* extract = app.add_subcommand("extract", "Extract attribute predictions from a corpus");
    extract->add_option("corpus", extract_path, "Corpus file")->required();
    extract->add_option("--model", extract_model, "Model file (not needed with --template-only)");
    extract->add_option("-o,--output", extract_out, "Predictions file ('-' for stdout)");
    add_rule_options(extract, extract_rules);
    auto* svm_flag = extract->add_flag("--svm-only", svm_only, "Use only the SVM cascade");
    extract->add_flag("--template-only", template_only, "Use only the templates")->excludes(svm_flag);

    // evaluate
    std::string eval_predictions;
    std::string eval_gold;
    bool eval_tsv = false;
    auto* evaluate = app.add_subcommand("evaluate", "Score a predictions file against gold");
    evaluate->add_option("predictions", eval_predictions, "Predictions file")->required();
    evaluate->add_option("--gold", eval_gold, "Gold corpus")->required();
    evaluate->add_flag("--tsv", eval_tsv, "Machine-readable report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    const unsigned threads = threads_from_env();

    try {
        if (*ingest) {
            const Corpus corpus = load_corpus(ingest_path);
            std::size_t tokens = 0;
            std::map<AttributeLabel, std::size_t> labels;
            for (const auto& s : corpus) {
                tokens += s.tokens.size();
                for (const auto& g : s.gold) ++labels[g.label];
            }
            const auto filtered = filter_sentences(corpus);
            std::size_t candidates = 0;
            for (const auto& s : filtered.kept) candidates += candidate_pairs(s).size();
            std::cout << "sentences\t" << corpus.size() << "\n"
                      << "tokens\t" << tokens << "\n"
                      << "kept\t" << filtered.kept.size() << "\n"
                      << "rejected\t" << filtered.rejected.size() << "\n"
                      << "candidates\t" << candidates << "\n";
            for (auto label : {AttributeLabel::BirthDate, AttributeLabel::BirthPlace,
                               AttributeLabel::Father, AttributeLabel::Mother, AttributeLabel::Other}) {
                std::cout << "gold." << to_string(label) << "\t" << labels[label] << "\n";
            }
        } else if (*synth) {
            gen.script = synth_ascii ? SurfaceScript::Ascii : SurfaceScript::Tibetan;
            try {
                gen.validate();
            } catch (const std::invalid_argument& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kUsageError;
            }
            write_file(synth_out, generate(gen));
        } else if (*split) {
            const auto fraction = parse_fraction(split_fraction);
            if (!fraction) {
                std::cerr << "error: --fraction must look like p/q\n";
                return kUsageError;
            }
            const Corpus corpus = load_corpus(split_path);
            CorpusSplit parts;
            try {
                parts = split_corpus(corpus, *fraction, split_seed);
            } catch (const std::invalid_argument& e) {
                throw DataError(e.what());
            }
            write_file(split_train, render_corpus(parts.train));
            write_file(split_test, render_corpus(parts.test));
            std::cerr << "train\t" << parts.train.size() << "\ntest\t" << parts.test.size() << "\n";
        } else if (*match) {
            const Corpus corpus = load_corpus(match_path);
            const RuleSet rules = load_rules(match_rules);
            const auto predictions =
                extract_corpus(corpus, rules, nullptr, ExtractionMode::TemplateOnly, threads);
            if (!match_out.empty()) write_file(match_out, write_predictions(predictions));
            std::cout << report_text(score(predictions, corpus), match_tsv);
        } else if (*train) {
            TrainingOptions options;
            options.threads = threads;
            if (!train_config.empty()) {
                try {
                    apply_config(options, read_file(train_config));
                } catch (const ParseError& e) {
                    throw DataError(train_config + ": " + e.what());
                }
            }
            if (train_c) options.svm.c = *train_c;
            if (train_tol) options.svm.tol = *train_tol;
            if (train_passes) options.svm.max_passes = *train_passes;
            if (train_min_freq) options.keywords.min_frequency = *train_min_freq;
            if (train_top_k) options.keywords.top_k_per_label = *train_top_k;
            if (train_no_fast_track) options.hierarchy.fast_track.clear();
            const Corpus corpus = load_corpus(train_path);
            const RuleSet rules = load_rules(train_rules);
            TrainedSystem system;
            try {
                system = train_system(corpus, rules, options);
            } catch (const std::invalid_argument& e) {
                throw DataError(e.what());
            }
            write_file(train_out, serialize_model(system));
            std::cerr << "features\t" << system.features.size() << "\nkeywords\t"
                      << system.keywords.size() << "\nclassifiers\t"
                      << classifier_count(system.hierarchy.config) << "\n";
        } else if (*extract) {
            const ExtractionMode mode = svm_only        ? ExtractionMode::SvmOnly
                                        : template_only ? ExtractionMode::TemplateOnly
                                                        : ExtractionMode::Hybrid;
            if (mode != ExtractionMode::TemplateOnly && extract_model.empty()) {
                std::cerr << "error: --model is required unless --template-only is given\n";
                return kUsageError;
            }
            const Corpus corpus = load_corpus(extract_path);
            const RuleSet rules = load_rules(extract_rules);
            std::optional<TrainedSystem> system;
            if (!extract_model.empty()) system = deserialize_model(read_file(extract_model));
            const auto predictions =
                extract_corpus(corpus, rules, system ? &*system : nullptr, mode, threads);
            write_file(extract_out, write_predictions(predictions));
        } else if (*evaluate) {
            const Corpus gold = load_corpus(eval_gold);
            std::vector<PredictionRecord> predictions;
            try {
                predictions = read_predictions(read_file(eval_predictions));
            } catch (const ParseError& e) {
                throw DataError(eval_predictions + ": " + e.what());
            }
            std::cout << report_text(score(predictions, gold), eval_tsv);
        }
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const ModelFormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDataError;
    }
    return 0;
}
