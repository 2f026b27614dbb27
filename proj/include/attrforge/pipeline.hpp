#pragma once

// End-to-end training and extraction over corpora.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrforge/corpus.hpp"
#include "attrforge/eval.hpp"
#include "attrforge/features.hpp"
#include "attrforge/hierarchy.hpp"
#include "attrforge/svm.hpp"
#include "attrforge/templates.hpp"

namespace attrforge {

// Everything an SVM extraction needs at inference time.
struct TrainedSystem {
    FeatureMap features;
    KeywordTable keywords;
    HierarchyModel hierarchy;

    friend bool operator==(const TrainedSystem&, const TrainedSystem&) = default;
};

struct TrainingOptions {
    KeywordParams keywords;
    SvmParams svm;
    HierarchyConfig hierarchy = HierarchyConfig::default_config();
    bool rule_literals_as_keywords = true;
    unsigned threads = 1;
    std::function<void(const BinaryTask&)> on_binary_train;
};

// Applies `key = value` lines ('#' comments) onto options. Keys:
//   hierarchy.layers, fasttrack.enabled, fasttrack.<N>.cond, fasttrack.<N>.target,
//   svm.c, svm.tol, svm.eps, svm.max_passes,
//   keywords.min_frequency, keywords.top_k
// Any fasttrack.<N>.* key replaces the default fast-track rules; N is the
// rule's priority. Throws ParseError on unknown keys or bad values.
void apply_config(TrainingOptions& options, std::string_view text);

// Filter, enumerate candidates, select keywords, vectorize (growing the
// feature map), freeze, then train the hierarchy.
TrainedSystem train_system(std::span<const TaggedSentence> train, const RuleSet& rules,
                           const TrainingOptions& options);

enum class ExtractionMode { Hybrid, TemplateOnly, SvmOnly };

std::string_view to_string(ExtractionMode mode);

// SVM cascade over candidates; Other outcomes produce no prediction.
std::vector<Prediction> extract_svm(const TrainedSystem& system,
                                    std::span<const CandidateInstance> cands);

// Template label when any rule matches, otherwise the SVM cascade.
std::vector<Prediction> extract_hybrid(const RuleSet& rules, const TrainedSystem& system,
                                       std::span<const CandidateInstance> cands);

// Runs the filter and candidate enumeration over the corpus, then the chosen
// extractor. `system` may be null for TemplateOnly. Output is sorted by
// sentence id, then e1, then e2, regardless of the worker count.
std::vector<PredictionRecord> extract_corpus(std::span<const TaggedSentence> corpus,
                                             const RuleSet& rules, const TrainedSystem* system,
                                             ExtractionMode mode, unsigned threads = 1);

PredictionRecord to_record(const Prediction& prediction);

// Versioned text model file: "ATTRFORGE-MODEL v1" header, feature map,
// keyword table, hierarchy topology with fast-track rules, one section per
// binary classifier. Reals use shortest round-trip formatting.
std::string serialize_model(const TrainedSystem& system);
// Throws ModelFormatError on a bad header/version or a truncated stream.
TrainedSystem deserialize_model(std::string_view bytes);

inline constexpr std::string_view kModelHeader = "ATTRFORGE-MODEL v1";

// ATTRFORGE_THREADS when set to a positive integer, otherwise 1.
unsigned threads_from_env();

}  // namespace attrforge
