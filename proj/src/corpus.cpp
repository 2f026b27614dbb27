#include "attrforge/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <set>
#include <stdexcept>

#include "attrforge/error.hpp"
#include "attrforge/unicode.hpp"
#include "text_util.hpp"

namespace attrforge {

ParseError::ParseError(const std::string& what, std::size_t line, std::size_t column)
    : std::runtime_error(line == 0 ? what
                                   : "line " + std::to_string(line) +
                                         (column == 0 ? "" : ":" + std::to_string(column)) +
                                         ": " + what),
      line_(line),
      column_(column) {}

std::string_view to_string(NeTag tag) {
    switch (tag) {
        case NeTag::Per: return "PER";
        case NeTag::Loc: return "LOC";
        case NeTag::Time: return "TIME";
        case NeTag::O: return "O";
    }
    return "O";
}

std::string_view to_string(AttributeLabel label) {
    switch (label) {
        case AttributeLabel::BirthDate: return "BirthDate";
        case AttributeLabel::BirthPlace: return "BirthPlace";
        case AttributeLabel::Father: return "Father";
        case AttributeLabel::Mother: return "Mother";
        case AttributeLabel::Other: return "Other";
    }
    return "Other";
}

std::optional<NeTag> parse_ne_tag(std::string_view text) {
    if (text == "PER") return NeTag::Per;
    if (text == "LOC") return NeTag::Loc;
    if (text == "TIME") return NeTag::Time;
    if (text == "O") return NeTag::O;
    return std::nullopt;
}

std::optional<AttributeLabel> parse_label(std::string_view text) {
    for (auto label : {AttributeLabel::BirthDate, AttributeLabel::BirthPlace,
                       AttributeLabel::Father, AttributeLabel::Mother, AttributeLabel::Other}) {
        if (text == to_string(label)) return label;
    }
    return std::nullopt;
}

bool is_pos_tag(std::string_view text) {
    return std::find(kPosTags.begin(), kPosTags.end(), text) != kPosTags.end();
}

std::string format_span(const Span& span) {
    return std::to_string(span.start) + "-" + std::to_string(span.end);
}

std::optional<Span> parse_span(std::string_view text) {
    const auto dash = text.find('-');
    if (dash == std::string_view::npos) return std::nullopt;
    auto start = detail::parse_size(text.substr(0, dash));
    auto end = detail::parse_size(text.substr(dash + 1));
    if (!start || !end) return std::nullopt;
    return Span{*start, *end};
}

namespace {

struct PendingRel {
    GoldAnnotation annotation;
    std::size_t line;
};

class CorpusReader {
public:
    Corpus read(std::string_view text) {
        std::size_t line_no = 0;
        for (std::string_view line : detail::split_lines(text)) {
            ++line_no;
            if (line.empty()) {
                finish_block();
                continue;
            }
            if (line.find('\t') == std::string_view::npos && line.front() == '#') {
                header(line, line_no);
            } else {
                token(line, line_no);
            }
        }
        finish_block();
        return std::move(corpus_);
    }

private:
    void header(std::string_view line, std::size_t line_no) {
        if (!current_.tokens.empty()) {
            throw ParseError("header line after token lines in the same block", line_no);
        }
        in_block_ = true;
        const auto fields = detail::split_whitespace(line);
        if (fields[0] == "#id") {
            if (fields.size() < 2) throw ParseError("#id needs a value", line_no);
            if (id_line_ != 0) throw ParseError("duplicate #id in block", line_no);
            const auto rest = detail::trim(line.substr(3));
            auto normalized = nfc_normalize(rest);
            if (!normalized) throw ParseError("invalid UTF-8", line_no);
            current_.id = std::move(*normalized);
            id_line_ = line_no;
        } else if (fields[0] == "#rel") {
            if (fields.size() != 4) {
                throw ParseError("#rel expects <label> <s>-<e> <s>-<e>", line_no);
            }
            auto label = parse_label(fields[1]);
            if (!label) throw ParseError("unknown label '" + std::string(fields[1]) + "'", line_no);
            auto e1 = parse_span(fields[2]);
            auto e2 = parse_span(fields[3]);
            if (!e1 || !e2) throw ParseError("malformed span", line_no);
            rels_.push_back({GoldAnnotation{*label, *e1, *e2}, line_no});
        } else {
            throw ParseError("unknown header '" + std::string(fields[0]) + "'", line_no);
        }
    }

    void token(std::string_view line, std::size_t line_no) {
        in_block_ = true;
        if (block_start_ == 0) block_start_ = line_no;
        const auto cols = detail::split(line, '\t');
        if (cols.size() != 3) {
            throw ParseError("expected 3 tab-separated columns, found " +
                                 std::to_string(cols.size()),
                             line_no);
        }
        if (cols[0].empty()) throw ParseError("empty surface", line_no, 1);
        auto surface = nfc_normalize(cols[0]);
        if (!surface) throw ParseError("invalid UTF-8", line_no, 1);
        if (!is_pos_tag(cols[1])) {
            throw ParseError("unknown POS tag '" + std::string(cols[1]) + "'", line_no, 2);
        }
        auto ne = parse_ne_tag(cols[2]);
        if (!ne) throw ParseError("unknown NE tag '" + std::string(cols[2]) + "'", line_no, 3);
        current_.tokens.push_back({std::move(*surface), std::string(cols[1]), *ne});
    }

    void finish_block() {
        if (!in_block_) return;
        const std::size_t n = current_.tokens.size();
        if (n == 0) {
            throw ParseError("sentence block without tokens",
                             id_line_ != 0 ? id_line_ : rels_.front().line);
        }
        for (const auto& rel : rels_) {
            const auto& a = rel.annotation;
            if (a.e1.empty() || a.e2.empty()) throw ParseError("empty span", rel.line);
            if (a.e1.end > n || a.e2.end > n) throw ParseError("span out of range", rel.line);
            if (a.e1.overlaps(a.e2)) throw ParseError("overlapping spans", rel.line);
            current_.gold.push_back(a);
        }
        if (current_.id.empty()) current_.id = "s" + std::to_string(corpus_.size() + 1);
        if (!ids_.insert(current_.id).second) {
            throw ParseError("duplicate sentence id '" + current_.id + "'",
                             id_line_ != 0 ? id_line_ : block_start_);
        }
        corpus_.push_back(std::move(current_));
        current_ = {};
        rels_.clear();
        id_line_ = 0;
        block_start_ = 0;
        in_block_ = false;
    }

    Corpus corpus_;
    TaggedSentence current_;
    std::vector<PendingRel> rels_;
    std::set<std::string, std::less<>> ids_;
    std::size_t id_line_ = 0;
    std::size_t block_start_ = 0;
    bool in_block_ = false;
};

}  // namespace

Corpus parse_corpus(std::string_view text) {
    return CorpusReader{}.read(text);
}

std::string render_corpus(std::span<const TaggedSentence> sentences) {
    std::string out;
    for (const auto& s : sentences) {
        out += "#id ";
        out += s.id;
        out += '\n';
        for (const auto& g : s.gold) {
            out += "#rel ";
            out += to_string(g.label);
            out += ' ';
            out += format_span(g.e1);
            out += ' ';
            out += format_span(g.e2);
            out += '\n';
        }
        for (const auto& t : s.tokens) {
            out += t.surface;
            out += '\t';
            out += t.pos;
            out += '\t';
            out += to_string(t.ne);
            out += '\n';
        }
        out += '\n';
    }
    return out;
}

bool passes_entity_filter(const TaggedSentence& sentence) {
    std::size_t per = 0;
    std::size_t entities = 0;
    for (const auto& t : sentence.tokens) {
        if (t.ne == NeTag::O) continue;
        ++entities;
        if (t.ne == NeTag::Per) ++per;
    }
    return per >= 1 && entities >= 2;
}

FilterResult filter_sentences(std::span<const TaggedSentence> sentences) {
    FilterResult result;
    for (const auto& s : sentences) {
        (passes_entity_filter(s) ? result.kept : result.rejected).push_back(s);
    }
    return result;
}

std::vector<Span> entity_spans(const TaggedSentence& sentence) {
    std::vector<Span> spans;
    const auto& tokens = sentence.tokens;
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (tokens[i].ne == NeTag::O) {
            ++i;
            continue;
        }
        std::size_t j = i + 1;
        while (j < tokens.size() && tokens[j].ne == tokens[i].ne) ++j;
        spans.push_back({i, j});
        i = j;
    }
    return spans;
}

std::vector<CandidateInstance> candidate_pairs(const TaggedSentence& sentence) {
    std::vector<CandidateInstance> out;
    const auto spans = entity_spans(sentence);
    for (const auto& e1 : spans) {
        if (sentence.tokens[e1.start].ne != NeTag::Per) continue;
        for (const auto& e2 : spans) {
            if (e2 == e1) continue;
            out.push_back({&sentence, e1, e2});
        }
    }
    return out;
}

std::vector<LabeledCandidate> labeled_candidates(std::span<const TaggedSentence> sentences) {
    std::vector<LabeledCandidate> out;
    for (const auto& s : sentences) {
        if (!passes_entity_filter(s)) continue;
        for (const auto& cand : candidate_pairs(s)) {
            AttributeLabel label = AttributeLabel::Other;
            for (const auto& g : s.gold) {
                if (g.e1 == cand.e1 && g.e2 == cand.e2) {
                    label = g.label;
                    break;
                }
            }
            out.push_back({cand, label});
        }
    }
    return out;
}

std::optional<Fraction> parse_fraction(std::string_view text) {
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    std::int64_t num = 0;
    std::int64_t den = 0;
    const auto lhs = text.substr(0, slash);
    const auto rhs = text.substr(slash + 1);
    if (std::from_chars(lhs.data(), lhs.data() + lhs.size(), num).ptr != lhs.data() + lhs.size())
        return std::nullopt;
    if (std::from_chars(rhs.data(), rhs.data() + rhs.size(), den).ptr != rhs.data() + rhs.size())
        return std::nullopt;
    if (den <= 0) return std::nullopt;
    return Fraction{num, den};
}

CorpusSplit split_corpus(std::span<const TaggedSentence> sentences, Fraction train_fraction,
                         std::uint64_t seed) {
    const auto n = static_cast<std::int64_t>(sentences.size());
    if (n < 2) throw std::invalid_argument("split_corpus needs at least 2 sentences");
    if (train_fraction.denominator <= 0 || train_fraction.numerator <= 0 ||
        train_fraction.numerator >= train_fraction.denominator) {
        throw std::invalid_argument("train fraction must lie strictly between 0 and 1");
    }

    std::vector<std::size_t> order(sentences.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    // Fisher-Yates.
    std::mt19937_64 rng(seed);
    for (std::size_t i = order.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }

    const std::int64_t p = train_fraction.numerator;
    const std::int64_t q = train_fraction.denominator;
    const auto n_train = static_cast<std::size_t>((2 * p * n + q) / (2 * q));

    CorpusSplit split;
    split.train.reserve(n_train);
    split.test.reserve(sentences.size() - n_train);
    for (std::size_t i = 0; i < order.size(); ++i) {
        (i < n_train ? split.train : split.test).push_back(sentences[order[i]]);
    }
    return split;
}

}  // namespace attrforge
