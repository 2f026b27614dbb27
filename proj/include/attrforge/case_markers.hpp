#pragma once

// Tibetan case-marker lexicon. File format, one entry per line:
//
//   marker<TAB>MAJOR[<TAB>SUB]
//
// MAJOR is NOM, POSS, PULL or FROM. A NOM or PULL entry without a SUB is
// ambiguous between that class's sub-cases and matches any of them.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace attrforge {

enum class CaseMajor : std::uint8_t { Nominative, Possessive, Pull, From };

enum class CaseSub : std::uint8_t { Apply, Tools, Occupation, For, Depend, Community, Time };

std::string_view to_string(CaseMajor major);
std::string_view to_string(CaseSub sub);
std::optional<CaseMajor> parse_case_major(std::string_view text);
std::optional<CaseSub> parse_case_sub(std::string_view text);

// Nominative allows {Apply, Tools}; Pull allows the other five; the rest none.
bool sub_allowed(CaseMajor major, CaseSub sub);

struct CaseMarkerClass {
    CaseMajor major = CaseMajor::Nominative;
    std::optional<CaseSub> sub;

    // True for a sub-classed major stored without its sub-case.
    bool ambiguous() const noexcept {
        return !sub && (major == CaseMajor::Nominative || major == CaseMajor::Pull);
    }
    friend bool operator==(const CaseMarkerClass&, const CaseMarkerClass&) = default;
};

class CaseMarkerLexicon {
public:
    CaseMarkerLexicon() = default;

    // Throws ParseError on bad lines or duplicate markers.
    static CaseMarkerLexicon parse(std::string_view text);
    // The lexicon shipped in data/case_markers.tsv.
    static const CaseMarkerLexicon& bundled();

    // Throws std::invalid_argument for a duplicate surface or disallowed sub.
    void add(std::string surface, CaseMarkerClass cls);

    std::optional<CaseMarkerClass> classify(std::string_view surface) const;
    std::size_t size() const noexcept { return entries_.size(); }
    const std::map<std::string, CaseMarkerClass, std::less<>>& entries() const noexcept {
        return entries_;
    }
    std::string render() const;

    friend bool operator==(const CaseMarkerLexicon&, const CaseMarkerLexicon&) = default;

private:
    std::map<std::string, CaseMarkerClass, std::less<>> entries_;
};

inline std::optional<CaseMarkerClass> classify_case_marker(std::string_view surface,
                                                           const CaseMarkerLexicon& lexicon) {
    return lexicon.classify(surface);
}

std::string_view bundled_lexicon_text();

}  // namespace attrforge
