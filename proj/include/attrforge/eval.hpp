#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "attrforge/corpus.hpp"

namespace attrforge {

// One line of a predictions file:
//   sentence_id<TAB>label<TAB>e1_start-e1_end<TAB>e2_start-e2_end
struct PredictionRecord {
    std::string sentence_id;
    AttributeLabel label = AttributeLabel::Other;
    Span e1;
    Span e2;

    friend auto operator<=>(const PredictionRecord&, const PredictionRecord&) = default;
};

std::string write_predictions(std::span<const PredictionRecord> records);
// Throws ParseError with the line number.
std::vector<PredictionRecord> read_predictions(std::string_view text);

struct CategoryCounts {
    std::size_t total = 0;       // gold instances
    std::size_t identified = 0;  // system predictions with this label
    std::size_t correct = 0;     // predictions matching a gold instance exactly

    // Percentages; 0 on a zero denominator.
    double precision() const;
    double recall() const;
    double f1() const;

    friend bool operator==(const CategoryCounts&, const CategoryCounts&) = default;
};

struct EvalReport {
    std::map<AttributeLabel, CategoryCounts> per_category;

    friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

// Correct = same sentence, label, e1 and e2 as a gold annotation; each gold
// annotation credits at most one prediction. Throws DataError when a record
// names a sentence id absent from the gold corpus.
EvalReport score(std::span<const PredictionRecord> predictions, std::span<const TaggedSentence> gold);

// 100 * num / den rounded half-up to 2 decimals, computed exactly in integers.
// "0.00" when den == 0.
std::string format_percent(std::uint64_t num, std::uint64_t den);

// Exact rational forms: P = c/i, R = c/t, F1 = 2c/(i+t).
std::string format_precision(const CategoryCounts& counts);
std::string format_recall(const CategoryCounts& counts);
std::string format_f1(const CategoryCounts& counts);

// Fixed-width table: Category | Total | Identified | Correct | P | R | F1.
std::string render_report(const EvalReport& report);
// label<TAB>total<TAB>identified<TAB>correct<TAB>p<TAB>r<TAB>f1 lines.
std::string render_report_tsv(const EvalReport& report);

}  // namespace attrforge
