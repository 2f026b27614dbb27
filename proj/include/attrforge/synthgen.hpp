#pragma once

// Seeded synthetic corpus generator. Sentences instantiate per-label
// skeletons that line up with the bundled templates; a noise fraction of
// sentences is perturbed so that templates miss them.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "attrforge/corpus.hpp"

namespace attrforge {

enum class SurfaceScript : std::uint8_t { Tibetan, Ascii };

// Indexed by AttributeLabel (BirthDate, BirthPlace, Father, Mother, Other).
using LabelMix = std::array<double, 5>;

struct GenParams {
    std::uint64_t seed = 42;
    std::size_t n_sentences = 2400;
    LabelMix label_mix = default_label_mix();
    double noise = 0.2;
    std::size_t vocab_size = 400;
    SurfaceScript script = SurfaceScript::Tibetan;

    // Other = 425/2400; the 1975 positive sentences are split in proportion
    // to the open-set category totals 219 : 223 : 184 : 220.
    static LabelMix default_label_mix();

    // Throws std::invalid_argument for a mix that does not sum to 1, noise
    // outside [0, 1] or a vocabulary below 16 words.
    void validate() const;
};

// Exact per-label sentence counts for n sentences (largest remainder).
std::array<std::size_t, 5> label_counts(const LabelMix& mix, std::size_t n);

// Column-format corpus text accepted by parse_corpus. Byte-identical for
// identical params.
std::string generate(const GenParams& params);

Corpus generate_corpus(const GenParams& params);

}  // namespace attrforge
