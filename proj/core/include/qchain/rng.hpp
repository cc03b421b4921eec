#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <utility>

namespace qchain {

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed) { return Rng{seed}; }

// Seed stream for independent Monte Carlo trials: base seed plus trial index.
inline Rng trial_rng(std::uint64_t base_seed, std::uint64_t trial_index) {
    return Rng{base_seed + trial_index};
}

// Uniform double in [0, 1) built from the top 53 bits of the generator output.
// std::uniform_real_distribution is implementation-defined; this is not.
inline double uniform_unit(Rng& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Two independent standard normals (Box-Muller). The first uniform is shifted
// into (0, 1] so the logarithm is always finite.
inline std::pair<double, double> normal_pair(Rng& rng) {
    const double u1 = static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace qchain
