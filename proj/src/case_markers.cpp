#include "attrforge/case_markers.hpp"

#include <stdexcept>

#include "attrforge/error.hpp"
#include "attrforge/unicode.hpp"
#include "bundled_data.hpp"
#include "text_util.hpp"

namespace attrforge {

std::string_view to_string(CaseMajor major) {
    switch (major) {
        case CaseMajor::Nominative: return "NOM";
        case CaseMajor::Possessive: return "POSS";
        case CaseMajor::Pull: return "PULL";
        case CaseMajor::From: return "FROM";
    }
    return "NOM";
}

std::string_view to_string(CaseSub sub) {
    switch (sub) {
        case CaseSub::Apply: return "APPLY";
        case CaseSub::Tools: return "TOOLS";
        case CaseSub::Occupation: return "OCCUPATION";
        case CaseSub::For: return "FOR";
        case CaseSub::Depend: return "DEPEND";
        case CaseSub::Community: return "COMMUNITY";
        case CaseSub::Time: return "TIME";
    }
    return "APPLY";
}

std::optional<CaseMajor> parse_case_major(std::string_view text) {
    for (auto m : {CaseMajor::Nominative, CaseMajor::Possessive, CaseMajor::Pull, CaseMajor::From}) {
        if (text == to_string(m)) return m;
    }
    return std::nullopt;
}

std::optional<CaseSub> parse_case_sub(std::string_view text) {
    for (auto s : {CaseSub::Apply, CaseSub::Tools, CaseSub::Occupation, CaseSub::For,
                   CaseSub::Depend, CaseSub::Community, CaseSub::Time}) {
        if (text == to_string(s)) return s;
    }
    return std::nullopt;
}

bool sub_allowed(CaseMajor major, CaseSub sub) {
    switch (major) {
        case CaseMajor::Nominative: return sub == CaseSub::Apply || sub == CaseSub::Tools;
        case CaseMajor::Pull: return sub != CaseSub::Apply && sub != CaseSub::Tools;
        case CaseMajor::Possessive:
        case CaseMajor::From: return false;
    }
    return false;
}

void CaseMarkerLexicon::add(std::string surface, CaseMarkerClass cls) {
    if (surface.empty()) throw std::invalid_argument("empty case marker");
    if (cls.sub && !sub_allowed(cls.major, *cls.sub)) {
        throw std::invalid_argument(std::string(to_string(cls.sub.value())) +
                                    " is not a sub-case of " + std::string(to_string(cls.major)));
    }
    if (!entries_.emplace(std::move(surface), cls).second) {
        throw std::invalid_argument("duplicate case marker");
    }
}

CaseMarkerLexicon CaseMarkerLexicon::parse(std::string_view text) {
    CaseMarkerLexicon lexicon;
    std::size_t line_no = 0;
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        if (detail::trim(line).empty() || line.front() == '#') continue;
        const auto cols = detail::split(line, '\t');
        if (cols.size() < 2 || cols.size() > 3) {
            throw ParseError("expected marker<TAB>major[<TAB>sub]", line_no);
        }
        auto surface = nfc_normalize(cols[0]);
        if (!surface || surface->empty()) throw ParseError("bad marker surface", line_no, 1);
        auto major = parse_case_major(cols[1]);
        if (!major) throw ParseError("unknown case class '" + std::string(cols[1]) + "'", line_no, 2);
        CaseMarkerClass cls{*major, std::nullopt};
        if (cols.size() == 3 && !cols[2].empty()) {
            auto sub = parse_case_sub(cols[2]);
            if (!sub) throw ParseError("unknown sub-case '" + std::string(cols[2]) + "'", line_no, 3);
            cls.sub = sub;
        }
        try {
            lexicon.add(std::move(*surface), cls);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no);
        }
    }
    return lexicon;
}

const CaseMarkerLexicon& CaseMarkerLexicon::bundled() {
    static const CaseMarkerLexicon lexicon = parse(bundled_lexicon_text());
    return lexicon;
}

std::optional<CaseMarkerClass> CaseMarkerLexicon::classify(std::string_view surface) const {
    const auto it = entries_.find(surface);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string CaseMarkerLexicon::render() const {
    std::string out;
    for (const auto& [surface, cls] : entries_) {
        out += surface;
        out += '\t';
        out += to_string(cls.major);
        if (cls.sub) {
            out += '\t';
            out += to_string(*cls.sub);
        }
        out += '\n';
    }
    return out;
}

std::string_view bundled_lexicon_text() {
    return detail::kBundledLexicon;
}

}  // namespace attrforge
