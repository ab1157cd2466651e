#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

// Seeding and discrete sampling helpers. Everything here is deliberately
// implementation-pinned (no std::*_distribution) so that a given seed produces
// the same stream on every platform and compiler.

namespace eudrl {

// splitmix64 step; used only to mix seeds, never as the main generator.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t x = a;
    auto step = [&x](std::uint64_t v) {
        x += 0x9E3779B97F4A7C15ull + v;
        std::uint64_t z = x;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        x = z ^ (z >> 31);
    };
    step(b);
    step(c);
    return x;
}

// Independent stream keyed by (seed, stream, substream). Cheap enough to build
// one per trajectory, which makes batch sampling order- and thread-count-free.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0,
                                std::uint64_t substream = 0) {
    return std::mt19937_64(mix_seed(seed, stream, substream));
}

// Uniform double in [0,1) with 53 random bits.
inline double uniform53(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Inverse-CDF draw from a normalized probability row. Falls back to the last
// strictly positive entry so FP dust in the cumulative sum cannot select a
// zero-probability index.
inline int sample_index(std::span<const double> probs, std::mt19937_64& rng) {
    if (probs.empty()) throw std::invalid_argument("sample_index: empty probability row");
    const double u = uniform53(rng);
    double cum = 0.0;
    int last_positive = -1;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
        if (probs[i] > 0.0) last_positive = i;
        cum += probs[i];
        if (u < cum && probs[i] > 0.0) return i;
    }
    if (last_positive < 0) throw std::invalid_argument("sample_index: row sums to zero");
    return last_positive;
}

// Flat-Dirichlet row via normalized unit exponentials.
inline void dirichlet_row(std::span<double> out, std::mt19937_64& rng) {
    double total = 0.0;
    for (double& v : out) {
        v = -std::log1p(-uniform53(rng));
        total += v;
    }
    for (double& v : out) v /= total;
}

}  // namespace eudrl
