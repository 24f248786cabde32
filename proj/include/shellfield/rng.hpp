#pragma once

#include <cstdint>

#include "shellfield/geometry.hpp"

// Counter-based deterministic random numbers ("splitmix64-boxmuller-v1").
// Every variate is a pure function of (seed, sample index, component
// index), so draws are bit-exact regardless of evaluation order or the
// degree of parallelism. The mixing function is the splitmix64 finalizer.

namespace shellfield {

inline constexpr const char* kRngAlgorithm = "splitmix64-boxmuller-v1";

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_key(std::uint64_t seed, std::uint64_t sample, std::uint64_t comp) {
    std::uint64_t k = splitmix64(seed ^ 0xA3EC4F1D902B7E55ULL);
    k = splitmix64(k ^ sample);
    k = splitmix64(k ^ (comp * 0xD6E8FEB86659FD93ULL));
    return k;
}

// Uniform in the open interval (0, 1): 53-bit mantissa offset by half an ulp.
inline Real unit_open(std::uint64_t x) {
    return (static_cast<Real>(x >> 11) + 0.5) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two counter draws.
inline Real counter_normal(std::uint64_t seed, std::uint64_t sample, std::uint64_t comp) {
    const Real u1 = unit_open(counter_key(seed, sample, 2 * comp));
    const Real u2 = unit_open(counter_key(seed, sample, 2 * comp + 1));
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

}  // namespace shellfield
