#include "attrforge/templates.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "attrforge/error.hpp"
#include "attrforge/unicode.hpp"
#include "bundled_data.hpp"
#include "text_util.hpp"

namespace attrforge {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string render_atom(const PatternAtom& atom) {
    return std::visit(
        Overloaded{
            [](const LiteralAtom& a) { return "\"" + a.surface + "\""; },
            [](const PosAtom& a) { return "pos:" + a.tag; },
            [](const CaseAtom& a) {
                std::string out = "case:" + std::string(to_string(a.major));
                if (a.sub) out += "." + std::string(to_string(*a.sub));
                return out;
            },
            [](const SlotAtom& a) {
                std::string out = a.slot == Slot::E1 ? "E1" : "E2";
                if (a.ne) out += ":" + std::string(to_string(*a.ne));
                return out;
            },
            [](const GapAtom& a) {
                return "*{" + std::to_string(a.min) + "," + std::to_string(a.max) + "}";
            },
        },
        atom);
}

std::string render_rule(const TemplateRule& rule) {
    std::string out = "RULE " + rule.id + " " + std::to_string(rule.priority) + " " +
                      std::string(to_string(rule.label)) + " :";
    for (const auto& atom : rule.pattern) {
        out += ' ';
        out += render_atom(atom);
    }
    return out;
}

void validate_rule(const TemplateRule& rule) {
    if (rule.id.empty()) throw std::invalid_argument("rule id is empty");
    if (rule.label == AttributeLabel::Other) {
        throw std::invalid_argument("rule " + rule.id + ": label Other is not allowed");
    }
    int e1 = 0;
    int e2 = 0;
    for (const auto& atom : rule.pattern) {
        if (const auto* slot = std::get_if<SlotAtom>(&atom)) {
            (slot->slot == Slot::E1 ? e1 : e2)++;
        } else if (const auto* gap = std::get_if<GapAtom>(&atom)) {
            if (gap->min > gap->max) throw std::invalid_argument("gap min exceeds max");
            if (gap->max > kMaxGap) throw std::invalid_argument("gap max exceeds 10");
        } else if (const auto* pos = std::get_if<PosAtom>(&atom)) {
            if (!is_pos_tag(pos->tag)) throw std::invalid_argument("unknown POS tag " + pos->tag);
        } else if (const auto* c = std::get_if<CaseAtom>(&atom)) {
            if (c->sub && !sub_allowed(c->major, *c->sub)) {
                throw std::invalid_argument("sub-case not allowed for this case class");
            }
        } else if (const auto* lit = std::get_if<LiteralAtom>(&atom)) {
            if (lit->surface.empty()) throw std::invalid_argument("empty literal");
        }
    }
    if (e1 != 1 || e2 != 1) {
        throw std::invalid_argument("rule " + rule.id + ": pattern needs exactly one E1 and one E2");
    }
}

RuleSet::RuleSet(std::vector<TemplateRule> rules, CaseMarkerLexicon lexicon)
    : rules_(std::move(rules)), lexicon_(std::move(lexicon)) {
    std::set<std::string_view> ids;
    for (const auto& r : rules_) {
        validate_rule(r);
        if (!ids.insert(r.id).second) throw std::invalid_argument("duplicate rule id " + r.id);
    }
    std::stable_sort(rules_.begin(), rules_.end(), [](const auto& a, const auto& b) {
        if (a.priority != b.priority) return a.priority < b.priority;
        return a.id < b.id;
    });
}

namespace {

struct Lexeme {
    std::string_view text;
    std::size_t column;  // 1-based byte column
    bool quoted = false;
};

std::vector<Lexeme> lex_rule_line(std::string_view line, std::size_t line_no) {
    std::vector<Lexeme> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (detail::is_space(line[i])) {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        if (line[i] == '"') {
            const auto close = line.find('"', i + 1);
            if (close == std::string_view::npos) {
                throw ParseError("unterminated literal", line_no, i + 1);
            }
            out.push_back({line.substr(i + 1, close - i - 1), i + 1, true});
            i = close + 1;
            continue;
        }
        const std::size_t start = i;
        while (i < line.size() && !detail::is_space(line[i])) ++i;
        out.push_back({line.substr(start, i - start), start + 1, false});
    }
    return out;
}

PatternAtom parse_atom(const Lexeme& lx, std::size_t line_no) {
    const auto fail = [&](const std::string& msg) -> PatternAtom {
        throw ParseError(msg + " in atom '" + std::string(lx.text) + "'", line_no, lx.column);
    };
    const std::string_view t = lx.text;
    if (lx.quoted) {
        if (t.empty()) return fail("empty literal");
        auto nfc = nfc_normalize(t);
        if (!nfc) return fail("invalid UTF-8");
        return LiteralAtom{std::move(*nfc)};
    }
    if (t.starts_with("pos:")) {
        const auto tag = t.substr(4);
        if (!is_pos_tag(tag)) return fail("unknown POS tag");
        return PosAtom{std::string(tag)};
    }
    if (t.starts_with("case:")) {
        auto body = t.substr(5);
        std::optional<CaseSub> sub;
        if (const auto dot = body.find('.'); dot != std::string_view::npos) {
            sub = parse_case_sub(body.substr(dot + 1));
            if (!sub) return fail("unknown sub-case");
            body = body.substr(0, dot);
        }
        const auto major = parse_case_major(body);
        if (!major) return fail("unknown case class");
        if (sub && !sub_allowed(*major, *sub)) return fail("sub-case not allowed for case class");
        return CaseAtom{*major, sub};
    }
    if (t.starts_with("E1") || t.starts_with("E2")) {
        SlotAtom slot{t[1] == '1' ? Slot::E1 : Slot::E2, std::nullopt};
        const auto rest = t.substr(2);
        if (!rest.empty()) {
            if (rest.front() != ':') return fail("expected ':' after slot");
            slot.ne = parse_ne_tag(rest.substr(1));
            if (!slot.ne || *slot.ne == NeTag::O) return fail("slot NE must be PER, LOC or TIME");
        }
        return slot;
    }
    if (t.starts_with("*{")) {
        if (t.back() != '}') return fail("malformed gap");
        const auto body = t.substr(2, t.size() - 3);
        const auto comma = body.find(',');
        if (comma == std::string_view::npos) return fail("malformed gap");
        const auto lo = detail::parse_size(body.substr(0, comma));
        const auto hi = detail::parse_size(body.substr(comma + 1));
        if (!lo || !hi) return fail("malformed gap bounds");
        if (*lo > *hi) return fail("gap min exceeds max");
        if (*hi > kMaxGap) return fail("gap max exceeds 10");
        return GapAtom{static_cast<unsigned>(*lo), static_cast<unsigned>(*hi)};
    }
    return fail("unknown atom");
}

}  // namespace

RuleSet parse_rules(std::string_view text, CaseMarkerLexicon lexicon) {
    std::vector<TemplateRule> rules;
    std::set<std::string, std::less<>> ids;
    std::size_t line_no = 0;
    for (auto line : detail::split_lines(text)) {
        ++line_no;
        const auto lexemes = lex_rule_line(line, line_no);
        if (lexemes.empty()) continue;
        if (lexemes[0].quoted || lexemes[0].text != "RULE") {
            throw ParseError("expected RULE", line_no, lexemes[0].column);
        }
        if (lexemes.size() < 5 || lexemes[4].text != ":" || lexemes[4].quoted) {
            throw ParseError("expected RULE <id> <priority> <label> : <atoms>", line_no,
                             lexemes.back().column);
        }
        TemplateRule rule;
        rule.id = std::string(lexemes[1].text);
        const auto priority = detail::parse_int(lexemes[2].text);
        if (!priority) throw ParseError("priority must be an integer", line_no, lexemes[2].column);
        rule.priority = static_cast<int>(*priority);
        const auto label = parse_label(lexemes[3].text);
        if (!label) throw ParseError("unknown label", line_no, lexemes[3].column);
        if (*label == AttributeLabel::Other) {
            throw ParseError("rules may not predict Other", line_no, lexemes[3].column);
        }
        rule.label = *label;
        for (std::size_t i = 5; i < lexemes.size(); ++i) {
            rule.pattern.push_back(parse_atom(lexemes[i], line_no));
        }
        try {
            validate_rule(rule);
        } catch (const std::invalid_argument& e) {
            throw ParseError(e.what(), line_no, lexemes[0].column);
        }
        if (!ids.insert(rule.id).second) {
            throw ParseError("duplicate rule id '" + rule.id + "'", line_no, lexemes[1].column);
        }
        rules.push_back(std::move(rule));
    }
    return RuleSet(std::move(rules), std::move(lexicon));
}

std::string_view bundled_rules_text() {
    return detail::kBundledRules;
}

const RuleSet& bundled_rules() {
    static const RuleSet rules = parse_rules(bundled_rules_text(), CaseMarkerLexicon::bundled());
    return rules;
}

namespace {

bool case_matches(const CaseAtom& atom, const std::optional<CaseMarkerClass>& cls) {
    if (!cls || cls->major != atom.major) return false;
    if (!atom.sub || !cls->sub) return true;
    return *atom.sub == *cls->sub;
}

class Matcher {
public:
    Matcher(const TemplateRule& rule, const CandidateInstance& cand, const CaseMarkerLexicon& lexicon)
        : pattern_(rule.pattern), cand_(cand), tokens_(cand.sentence->tokens), lexicon_(lexicon) {}

    // Returns the end of the window if atoms [atom_index, end) match from pos.
    std::optional<std::size_t> run(std::size_t atom_index, std::size_t pos) const {
        if (atom_index == pattern_.size()) return pos;
        const auto& atom = pattern_[atom_index];
        if (const auto* gap = std::get_if<GapAtom>(&atom)) {
            for (unsigned len = gap->min; len <= gap->max; ++len) {
                if (pos + len > tokens_.size()) break;
                if (auto end = run(atom_index + 1, pos + len)) return end;
            }
            return std::nullopt;
        }
        if (const auto* slot = std::get_if<SlotAtom>(&atom)) {
            const Span& span = slot->slot == Slot::E1 ? cand_.e1 : cand_.e2;
            if (span.start != pos) return std::nullopt;
            if (slot->ne && tokens_[span.start].ne != *slot->ne) return std::nullopt;
            return run(atom_index + 1, span.end);
        }
        if (pos >= tokens_.size()) return std::nullopt;
        if (!single_token_matches(atom, tokens_[pos])) return std::nullopt;
        return run(atom_index + 1, pos + 1);
    }

private:
    bool single_token_matches(const PatternAtom& atom, const TaggedToken& token) const {
        if (const auto* lit = std::get_if<LiteralAtom>(&atom)) return lit->surface == token.surface;
        if (const auto* pos = std::get_if<PosAtom>(&atom)) return pos->tag == token.pos;
        if (const auto* c = std::get_if<CaseAtom>(&atom)) {
            return case_matches(*c, lexicon_.classify(token.surface));
        }
        return false;
    }

    const std::vector<PatternAtom>& pattern_;
    const CandidateInstance& cand_;
    const std::vector<TaggedToken>& tokens_;
    const CaseMarkerLexicon& lexicon_;
};

}  // namespace

std::optional<TemplateMatch> match_rule(const TemplateRule& rule, const CandidateInstance& cand,
                                        const CaseMarkerLexicon& lexicon) {
    if (rule.pattern.empty() || cand.sentence == nullptr) return std::nullopt;
    const Matcher matcher(rule, cand, lexicon);
    const std::size_t n = cand.sentence->tokens.size();
    // The window must contain E1, so it cannot start after e1.start.
    const std::size_t last_start = std::min(cand.e1.start, n);
    for (std::size_t start = 0; start <= last_start; ++start) {
        if (auto end = matcher.run(0, start)) return TemplateMatch{Span{start, *end}};
    }
    return std::nullopt;
}

std::optional<AttributeLabel> template_label(const RuleSet& rules, const CandidateInstance& cand) {
    for (const auto& rule : rules.rules()) {
        if (match_rule(rule, cand, rules.lexicon())) return rule.label;
    }
    return std::nullopt;
}

std::vector<Prediction> extract_by_templates(const RuleSet& rules,
                                             std::span<const CandidateInstance> cands) {
    std::vector<Prediction> out;
    for (const auto& cand : cands) {
        if (auto label = template_label(rules, cand)) out.push_back({cand, *label});
    }
    return out;
}

TemplateRule generalize_example(const TaggedSentence& sentence, const GoldAnnotation& gold,
                                const CaseMarkerLexicon& lexicon, std::string id, int priority) {
    const auto& tokens = sentence.tokens;
    const std::size_t n = tokens.size();
    if (gold.label == AttributeLabel::Other) {
        throw std::invalid_argument("cannot generalize an Other annotation");
    }
    if (gold.e1.empty() || gold.e2.empty() || gold.e1.end > n || gold.e2.end > n ||
        gold.e1.overlaps(gold.e2)) {
        throw std::invalid_argument("invalid gold spans");
    }
    if (gold.e2.start < gold.e1.start) {
        throw std::invalid_argument("e1 follows e2 in token order; reversed rules are unsupported");
    }

    const std::size_t last_entity_end = std::max(gold.e1.end, gold.e2.end);
    const std::size_t window_end = std::min(n, last_entity_end + 2);

    // First pass: one atom per token (or per entity span). Track which atoms
    // are collapsible into a gap.
    struct Draft {
        PatternAtom atom;
        bool collapsible;
    };
    std::vector<Draft> drafts;
    std::size_t i = gold.e1.start;
    while (i < window_end) {
        if (i == gold.e1.start || i == gold.e2.start) {
            const bool first = i == gold.e1.start;
            const Span& span = first ? gold.e1 : gold.e2;
            drafts.push_back({SlotAtom{first ? Slot::E1 : Slot::E2, tokens[span.start].ne}, false});
            i = span.end;
            continue;
        }
        const auto& token = tokens[i];
        if (auto cls = lexicon.classify(token.surface)) {
            drafts.push_back({CaseAtom{cls->major, cls->sub}, false});
        } else {
            // The token right after the last entity anchors the right edge.
            const bool anchor = i == last_entity_end;
            drafts.push_back({PosAtom{token.pos}, token.pos != "v" && !anchor});
        }
        ++i;
    }

    TemplateRule rule;
    rule.id = std::move(id);
    rule.priority = priority;
    rule.label = gold.label;
    std::size_t k = 0;
    while (k < drafts.size()) {
        if (!drafts[k].collapsible) {
            rule.pattern.push_back(std::move(drafts[k].atom));
            ++k;
            continue;
        }
        std::size_t run_end = k;
        while (run_end < drafts.size() && drafts[run_end].collapsible) ++run_end;
        const std::size_t run = run_end - k;
        if (run >= 2) {
            // Gaps are capped at kMaxGap, so very long runs become several gaps.
            for (std::size_t left = run; left > 0;) {
                const auto len = std::min<std::size_t>(left, kMaxGap);
                rule.pattern.push_back(GapAtom{0, static_cast<unsigned>(len)});
                left -= len;
            }
        } else {
            rule.pattern.push_back(std::move(drafts[k].atom));
        }
        k = run_end;
    }
    return rule;
}

}  // namespace attrforge
