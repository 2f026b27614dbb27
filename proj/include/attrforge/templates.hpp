#pragma once

// Entity-relation templates.
//
// Rule file grammar, one rule per line ('#' starts a comment):
//
//   RULE <id> <priority> <label> : <atom> <atom> ...
//
// Atoms:
//   "lit"            literal surface (NFC, byte-equal)
//   pos:<tag>        any token with that POS tag
//   case:MAJOR[.SUB] a token the lexicon classifies into that case class
//   E1[:NE] E2[:NE]  the candidate's entity spans, optionally NE-constrained
//   *{min,max}       gap of min..max arbitrary tokens (max <= 10)

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "attrforge/case_markers.hpp"
#include "attrforge/corpus.hpp"

namespace attrforge {

inline constexpr unsigned kMaxGap = 10;

struct LiteralAtom {
    std::string surface;
    friend bool operator==(const LiteralAtom&, const LiteralAtom&) = default;
};

struct PosAtom {
    std::string tag;
    friend bool operator==(const PosAtom&, const PosAtom&) = default;
};

struct CaseAtom {
    CaseMajor major = CaseMajor::Nominative;
    std::optional<CaseSub> sub;
    friend bool operator==(const CaseAtom&, const CaseAtom&) = default;
};

enum class Slot : std::uint8_t { E1, E2 };

struct SlotAtom {
    Slot slot = Slot::E1;
    std::optional<NeTag> ne;
    friend bool operator==(const SlotAtom&, const SlotAtom&) = default;
};

struct GapAtom {
    unsigned min = 0;
    unsigned max = 0;
    friend bool operator==(const GapAtom&, const GapAtom&) = default;
};

using PatternAtom = std::variant<LiteralAtom, PosAtom, CaseAtom, SlotAtom, GapAtom>;

std::string render_atom(const PatternAtom& atom);

struct TemplateRule {
    std::string id;
    int priority = 0;
    AttributeLabel label = AttributeLabel::BirthDate;
    std::vector<PatternAtom> pattern;

    friend bool operator==(const TemplateRule&, const TemplateRule&) = default;
};

// "RULE <id> <priority> <label> : <atoms>"
std::string render_rule(const TemplateRule& rule);

// Throws std::invalid_argument if the rule breaks an invariant (label Other,
// slot count, gap bounds, unknown POS tag).
void validate_rule(const TemplateRule& rule);

class RuleSet {
public:
    RuleSet() = default;
    RuleSet(std::vector<TemplateRule> rules, CaseMarkerLexicon lexicon);

    // Sorted by (priority, id).
    const std::vector<TemplateRule>& rules() const noexcept { return rules_; }
    const CaseMarkerLexicon& lexicon() const noexcept { return lexicon_; }
    bool empty() const noexcept { return rules_.empty(); }

private:
    std::vector<TemplateRule> rules_;
    CaseMarkerLexicon lexicon_;
};

// Throws ParseError with line/column on syntax errors, duplicate ids and
// rules labeled Other.
RuleSet parse_rules(std::string_view text, CaseMarkerLexicon lexicon = CaseMarkerLexicon::bundled());

// The rules shipped in data/templates.rules.
std::string_view bundled_rules_text();
const RuleSet& bundled_rules();

struct TemplateMatch {
    Span window;
};

// The pattern must cover a contiguous token window with E1/E2 landing exactly
// on the candidate's spans. Gaps are tried shortest-first; the earliest
// window start wins.
std::optional<TemplateMatch> match_rule(const TemplateRule& rule, const CandidateInstance& cand,
                                        const CaseMarkerLexicon& lexicon);

struct Prediction {
    CandidateInstance candidate;
    AttributeLabel label = AttributeLabel::Other;
};

// First matching rule (priority order) labels the candidate; candidates with
// no matching rule get no prediction.
std::vector<Prediction> extract_by_templates(const RuleSet& rules,
                                             std::span<const CandidateInstance> cands);
std::optional<AttributeLabel> template_label(const RuleSet& rules, const CandidateInstance& cand);

// Lifts an annotated example into a rule whose window runs from e1.start
// through the second token after the later entity (clipped to the sentence).
// Throws std::invalid_argument when e2 precedes e1 or the label is Other.
TemplateRule generalize_example(const TaggedSentence& sentence, const GoldAnnotation& gold,
                                const CaseMarkerLexicon& lexicon, std::string id = "gen",
                                int priority = 100);

}  // namespace attrforge
