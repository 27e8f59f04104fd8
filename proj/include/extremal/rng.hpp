#pragma once

#include <cstdint>
#include <random>

namespace extremal {

// mt19937_64 has a standard-specified output sequence, so runs are
// reproducible across standard libraries as long as we avoid the
// implementation-defined std:: distributions.
using Rng = std::mt19937_64;

// Counter-mode seed splitting: derive_seed(s, k) for k = 0, 1, ... yields
// statistically independent seeds regardless of evaluation order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, bound). bound must be positive.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);

inline bool coin_flip(Rng& rng) { return (rng() >> 63) != 0; }

}  // namespace extremal
