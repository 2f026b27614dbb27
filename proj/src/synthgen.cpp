#include "attrforge/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace attrforge {

LabelMix GenParams::default_label_mix() {
    constexpr double kOther = 425.0 / 2400.0;
    constexpr double kPositive = 1975.0 / 2400.0;
    constexpr double kTotals[] = {219.0, 223.0, 184.0, 220.0};
    constexpr double kSum = 219.0 + 223.0 + 184.0 + 220.0;
    LabelMix mix{};
    for (std::size_t i = 0; i < 4; ++i) mix[i] = kPositive * kTotals[i] / kSum;
    mix[4] = kOther;
    return mix;
}

void GenParams::validate() const {
    double sum = 0.0;
    for (double m : label_mix) {
        if (!(m >= 0.0)) throw std::invalid_argument("label mix entries must be non-negative");
        sum += m;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("label mix must sum to 1");
    if (!(noise >= 0.0 && noise <= 1.0)) throw std::invalid_argument("noise must lie in [0, 1]");
    if (vocab_size < 16) throw std::invalid_argument("vocab_size must be at least 16");
}

std::array<std::size_t, 5> label_counts(const LabelMix& mix, std::size_t n) {
    std::array<std::size_t, 5> counts{};
    std::array<double, 5> remainder{};
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < 5; ++i) {
        const double exact = mix[i] * static_cast<double>(n);
        counts[i] = static_cast<std::size_t>(std::floor(exact));
        remainder[i] = exact - static_cast<double>(counts[i]);
        assigned += counts[i];
    }
    std::array<std::size_t, 5> order{0, 1, 2, 3, 4};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
    for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % 5]];
    return counts;
}

namespace {

struct Word {
    std::string surface;
    std::string pos;
};

struct Lexicon {
    std::vector<std::string> persons;
    std::vector<std::string> places;
    std::vector<Word> fillers;  // pos a, d or n
};

// Words with a plain and a synonym form; noise swaps one for the other.
struct Keyword {
    std::string_view plain;
    std::string_view synonym;
};

constexpr Keyword kBorn{"སྐྱེས་", "འཁྲུངས་"};
constexpr Keyword kFather{"ཡབ་", "ཕ་"};
constexpr Keyword kMother{"ཡུམ་", "མ་"};
constexpr Keyword kOtherVerbs[] = {{"བསྡད་", "བཞུགས་"}, {"ཕེབས་", "སོང་"}};
constexpr Keyword kOtherRoles[] = {
    {"དགེ་རྒན་", "སློབ་དཔོན་"}, {"སློབ་མ་", "སློབ་ཕྲུག་"}, {"གྲོགས་པོ་", "རོགས་པ་"}};
constexpr Keyword kMet{"མཇལ་", "ཐུག་"};
constexpr std::string_view kCopulas[] = {"ཡིན་", "རེད་"};
constexpr std::string_view kPullMarkers[] = {"ལ་", "སུ་"};
constexpr std::string_view kPossMarkers[] = {"གི་", "གྱི་"};
constexpr std::string_view kNomMarker = "གིས་";
constexpr std::string_view kYearPrefix = "ཕྱི་ལོ་";
constexpr std::string_view kShad = "།";

constexpr std::string_view kConsonants[] = {"ཀ", "ཁ", "ག", "ང", "ཅ", "ཆ", "ཇ", "ཉ", "ཏ", "ཐ",
                                            "ད", "ན", "པ", "ཕ", "བ", "མ", "ཙ", "ཚ", "ཛ", "ཝ",
                                            "ཞ", "ཟ", "འ", "ཡ", "ར", "ལ", "ཤ", "ས", "ཧ", "ཨ"};
constexpr std::string_view kVowels[] = {"", "ི", "ུ", "ེ", "ོ"};
constexpr std::string_view kTsheg = "་";
constexpr std::size_t kSyllables = std::size(kConsonants) * std::size(kVowels);

std::string syllable(std::size_t index) {
    return std::string(kConsonants[index / std::size(kVowels)]) +
           std::string(kVowels[index % std::size(kVowels)]) + std::string(kTsheg);
}

// Distinct two-syllable words; index -> word is a bijection below kSyllables^2.
std::string synthetic_word(std::size_t index, SurfaceScript script) {
    if (script == SurfaceScript::Ascii) return "w" + std::to_string(index);
    // Stride through syllable space so consecutive words look unrelated.
    const std::size_t mixed = (index * 7919) % (kSyllables * kSyllables);
    return syllable(mixed / kSyllables) + syllable(mixed % kSyllables);
}

Lexicon build_lexicon(std::size_t vocab_size, SurfaceScript script) {
    Lexicon lex;
    const std::size_t persons = vocab_size / 4;
    const std::size_t places = vocab_size / 4;
    for (std::size_t i = 0; i < vocab_size; ++i) {
        std::string w = synthetic_word(i, script);
        if (i < persons) {
            lex.persons.push_back(std::move(w));
        } else if (i < persons + places) {
            lex.places.push_back(std::move(w));
        } else {
            static constexpr const char* kFillerPos[] = {"a", "d", "n"};
            lex.fillers.push_back({std::move(w), kFillerPos[i % 3]});
        }
    }
    return lex;
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }
    double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return unit() < p; }
    template <class T, std::size_t N>
    const T& pick(const T (&items)[N]) {
        return items[below(N)];
    }
    template <class T>
    const T& pick(const std::vector<T>& items) {
        return items[below(items.size())];
    }

private:
    std::mt19937_64 engine_;
};

struct Token {
    std::string surface;
    std::string pos;
    NeTag ne;
};

struct Draft {
    std::vector<Token> tokens;
    Span e1;
    Span e2;
    AttributeLabel label;
    std::size_t keyword = 0;  // token index of the swappable keyword
    Keyword keyword_forms;
};

class SentenceBuilder {
public:
    SentenceBuilder(Rng& rng, const Lexicon& lex, Draft& draft) : rng_(rng), lex_(lex), d_(draft) {}

    void word(std::string_view surface, std::string_view pos, NeTag ne = NeTag::O) {
        d_.tokens.push_back({std::string(surface), std::string(pos), ne});
    }

    Span person() {
        const std::size_t start = d_.tokens.size();
        word(rng_.pick(lex_.persons), "n", NeTag::Per);
        if (rng_.chance(0.3)) word(rng_.pick(lex_.persons), "n", NeTag::Per);
        return {start, d_.tokens.size()};
    }

    Span place() {
        const std::size_t start = d_.tokens.size();
        word(rng_.pick(lex_.places), "n", NeTag::Loc);
        if (rng_.chance(0.3)) word(rng_.pick(lex_.places), "n", NeTag::Loc);
        return {start, d_.tokens.size()};
    }

    Span time() {
        const std::size_t start = d_.tokens.size();
        if (rng_.chance(0.5)) word(kYearPrefix, "t", NeTag::Time);
        std::string year;
        static constexpr std::string_view kDigits[] = {"༠", "༡", "༢", "༣", "༤",
                                                       "༥", "༦", "༧", "༨", "༩"};
        const std::size_t value = 1900 + rng_.below(120);
        for (char ch : std::to_string(value)) year += kDigits[ch - '0'];
        word(year, "t", NeTag::Time);
        return {start, d_.tokens.size()};
    }

    void fillers(std::size_t max) {
        const std::size_t count = rng_.below(max + 1);
        for (std::size_t i = 0; i < count; ++i) {
            const auto& w = rng_.pick(lex_.fillers);
            word(w.surface, w.pos);
        }
    }

    void keyword(const Keyword& kw, std::string_view pos) {
        d_.keyword = d_.tokens.size();
        d_.keyword_forms = kw;
        word(kw.plain, pos);
    }

private:
    Rng& rng_;
    const Lexicon& lex_;
    Draft& d_;
};

Draft build_sentence(Rng& rng, const Lexicon& lex, AttributeLabel label) {
    Draft d;
    d.label = label;
    SentenceBuilder b(rng, lex, d);
    if (rng.chance(0.25)) {
        // Leading adverbial.
        const auto& w = rng.pick(lex.fillers);
        b.word(w.surface, w.pos);
    }
    switch (label) {
        case AttributeLabel::BirthDate:
            d.e1 = b.person();
            b.fillers(2);
            d.e2 = b.time();
            b.word(kPullMarkers[0], "k");
            b.keyword(kBorn, "v");
            break;
        case AttributeLabel::BirthPlace:
            d.e1 = b.person();
            b.fillers(2);
            d.e2 = b.place();
            b.word(rng.pick(kPullMarkers), "k");
            b.keyword(kBorn, "v");
            break;
        case AttributeLabel::Father:
        case AttributeLabel::Mother:
            d.e1 = b.person();
            b.word(rng.pick(kPossMarkers), "k");
            b.keyword(label == AttributeLabel::Father ? kFather : kMother, "n");
            d.e2 = b.person();
            b.word(rng.pick(kCopulas), "v");
            break;
        case AttributeLabel::Other:
            switch (rng.below(3)) {
                case 0:  // <person> ... <place> la stayed/went
                    d.e1 = b.person();
                    b.fillers(2);
                    d.e2 = b.place();
                    b.word(kPullMarkers[0], "k");
                    b.keyword(rng.pick(kOtherVerbs), "v");
                    break;
                case 1:  // <person> gi teacher/student/friend <person> yin
                    d.e1 = b.person();
                    b.word(rng.pick(kPossMarkers), "k");
                    b.keyword(rng.pick(kOtherRoles), "n");
                    d.e2 = b.person();
                    b.word(rng.pick(kCopulas), "v");
                    break;
                default:  // <person> gis <person> la met
                    d.e1 = b.person();
                    b.word(kNomMarker, "k");
                    d.e2 = b.person();
                    b.word(kPullMarkers[0], "k");
                    b.keyword(kMet, "v");
                    break;
            }
            break;
    }
    b.word(kShad, "x");
    return d;
}

bool in_span(std::size_t i, const Span& s) {
    return i >= s.start && i < s.end;
}

void shuffle_middle(Rng& rng, Draft& d) {
    // Non-entity tokens after e1, excluding the closing shad.
    std::vector<std::size_t> slots;
    for (std::size_t i = d.e1.end; i + 1 < d.tokens.size(); ++i) {
        if (!in_span(i, d.e1) && !in_span(i, d.e2)) slots.push_back(i);
    }
    if (slots.size() < 2) return;
    std::vector<Token> moved;
    for (std::size_t i : slots) moved.push_back(d.tokens[i]);
    std::vector<std::size_t> perm(slots.size());
    std::iota(perm.begin(), perm.end(), 0);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    if (std::is_sorted(perm.begin(), perm.end())) std::rotate(perm.begin(), perm.begin() + 1, perm.end());
    for (std::size_t k = 0; k < slots.size(); ++k) d.tokens[slots[k]] = moved[perm[k]];
}

void swap_keyword(Draft& d) {
    if (d.keyword_forms.plain.empty()) return;
    d.tokens[d.keyword].surface = std::string(d.keyword_forms.synonym);
}

void mislabel_ne(Draft& d) {
    // Never introduces TIME, so only genuine birth dates carry a TIME e2.
    const NeTag current = d.tokens[d.e2.start].ne;
    const NeTag replacement = current == NeTag::Loc ? NeTag::Per : NeTag::Loc;
    for (std::size_t i = d.e2.start; i < d.e2.end; ++i) d.tokens[i].ne = replacement;
}

}  // namespace

std::string generate(const GenParams& params) {
    params.validate();
    Rng rng(params.seed);
    const Lexicon lex = build_lexicon(params.vocab_size, params.script);

    const auto counts = label_counts(params.label_mix, params.n_sentences);
    std::vector<AttributeLabel> labels;
    labels.reserve(params.n_sentences);
    for (std::size_t l = 0; l < counts.size(); ++l) {
        labels.insert(labels.end(), counts[l], static_cast<AttributeLabel>(l));
    }
    for (std::size_t i = labels.size(); i > 1; --i) std::swap(labels[i - 1], labels[rng.below(i)]);

    std::string out;
    char id[32];
    for (std::size_t s = 0; s < labels.size(); ++s) {
        Draft d = build_sentence(rng, lex, labels[s]);
        if (rng.chance(params.noise)) {
            switch (rng.below(3)) {
                case 0: shuffle_middle(rng, d); break;
                case 1: swap_keyword(d); break;
                default: mislabel_ne(d); break;
            }
        }
        std::snprintf(id, sizeof(id), "s%05zu", s + 1);
        out += "#id ";
        out += id;
        out += "\n#rel ";
        out += to_string(d.label);
        out += ' ';
        out += format_span(d.e1);
        out += ' ';
        out += format_span(d.e2);
        out += '\n';
        for (const auto& t : d.tokens) {
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

Corpus generate_corpus(const GenParams& params) {
    return parse_corpus(generate(params));
}

}  // namespace attrforge
