#pragma once

// Tagged-corpus data model and the column file format.
//
//   #id <sentence id>
//   #rel <Label> <s>-<e> <s>-<e>
//   surface<TAB>pos<TAB>ne
//   ...
//   <blank line>
//
// Header lines precede the tokens of their block. Spans are half-open token
// ranges. Surfaces are NFC-normalized on ingest.

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace attrforge {

enum class NeTag : std::uint8_t { Per, Loc, Time, O };

enum class AttributeLabel : std::uint8_t { BirthDate, BirthPlace, Father, Mother, Other };

inline constexpr std::array<AttributeLabel, 4> kPositiveLabels = {
    AttributeLabel::BirthDate, AttributeLabel::BirthPlace, AttributeLabel::Father,
    AttributeLabel::Mother};

inline constexpr std::array<std::string_view, 10> kPosTags = {"n", "v", "t", "k", "a",
                                                               "d", "p", "m", "c", "x"};

std::string_view to_string(NeTag tag);
std::string_view to_string(AttributeLabel label);
std::optional<NeTag> parse_ne_tag(std::string_view text);
std::optional<AttributeLabel> parse_label(std::string_view text);
bool is_pos_tag(std::string_view text);

struct Span {
    std::size_t start = 0;
    std::size_t end = 0;

    std::size_t size() const noexcept { return end - start; }
    bool empty() const noexcept { return end <= start; }
    bool overlaps(const Span& other) const noexcept {
        return start < other.end && other.start < end;
    }
    friend auto operator<=>(const Span&, const Span&) = default;
};

// "3-5"
std::string format_span(const Span& span);
std::optional<Span> parse_span(std::string_view text);

struct TaggedToken {
    std::string surface;
    std::string pos;
    NeTag ne = NeTag::O;

    friend bool operator==(const TaggedToken&, const TaggedToken&) = default;
};

struct GoldAnnotation {
    AttributeLabel label = AttributeLabel::Other;
    Span e1;
    Span e2;

    friend bool operator==(const GoldAnnotation&, const GoldAnnotation&) = default;
};

struct TaggedSentence {
    std::string id;
    std::vector<TaggedToken> tokens;
    std::vector<GoldAnnotation> gold;

    friend bool operator==(const TaggedSentence&, const TaggedSentence&) = default;
};

using Corpus = std::vector<TaggedSentence>;

// The unit of classification. The sentence must outlive the candidate.
struct CandidateInstance {
    const TaggedSentence* sentence = nullptr;
    Span e1;
    Span e2;

    NeTag e1_ne() const { return sentence->tokens[e1.start].ne; }
    NeTag e2_ne() const { return sentence->tokens[e2.start].ne; }
};

struct LabeledCandidate {
    CandidateInstance candidate;
    AttributeLabel label = AttributeLabel::Other;
};

// Throws ParseError (with line number) on any format violation.
Corpus parse_corpus(std::string_view text);
std::string render_corpus(std::span<const TaggedSentence> sentences);

struct FilterResult {
    std::vector<TaggedSentence> kept;
    std::vector<TaggedSentence> rejected;
};

// Keeps sentences with at least one PER token and at least one further
// non-O token; order is preserved on both sides.
FilterResult filter_sentences(std::span<const TaggedSentence> sentences);
bool passes_entity_filter(const TaggedSentence& sentence);

// Maximal runs of identical non-O NE tags.
std::vector<Span> entity_spans(const TaggedSentence& sentence);

// Every (PER span, other PER/LOC/TIME span) pair, left to right by e1 then e2.
std::vector<CandidateInstance> candidate_pairs(const TaggedSentence& sentence);

// Filter + candidate enumeration over a corpus; each candidate is labeled with
// the gold annotation whose spans it matches exactly, or Other.
std::vector<LabeledCandidate> labeled_candidates(std::span<const TaggedSentence> sentences);

struct Fraction {
    std::int64_t numerator = 2;
    std::int64_t denominator = 3;
};
std::optional<Fraction> parse_fraction(std::string_view text);

struct CorpusSplit {
    std::vector<TaggedSentence> train;
    std::vector<TaggedSentence> test;
};

// Seeded Fisher-Yates shuffle then partition; |train| = round-half-up(fraction * n).
// Throws std::invalid_argument when n < 2 or the fraction is outside (0, 1).
CorpusSplit split_corpus(std::span<const TaggedSentence> sentences, Fraction train_fraction,
                         std::uint64_t seed);

}  // namespace attrforge
