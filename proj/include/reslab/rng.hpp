#pragma once

#include <cstdint>
#include <random>

namespace reslab {

// All randomness flows through a seeded mt19937_64 plus the helpers below.
// Distributions are hand-rolled so that results do not depend on the
// standard library's implementation of uniform_real_distribution.

inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53; // [0,1)
}

inline double uniform_real(std::mt19937_64& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

/// Uniform index in [0, n).  Modulo bias is irrelevant at the scales used.
inline std::uint64_t uniform_index(std::mt19937_64& g, std::uint64_t n) {
    return g() % n;
}

} // namespace reslab
