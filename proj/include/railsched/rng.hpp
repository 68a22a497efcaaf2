#pragma once

#include <cstdint>
#include <random>

namespace railsched {

// All stochastic code draws through these helpers instead of the std
// distributions, whose output is implementation-defined.  mt19937_64 itself
// is fully specified, so runs reproduce bit-for-bit across toolchains.

// splitmix64 finalizer; decorrelates (seed, stream) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
    return std::mt19937_64(mix64(mix64(seed) ^ mix64(~stream)));
}

// Uniform double in [0, 1) with 53 random bits.
inline double next_double(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n) via rejection; exact and portable.
inline std::uint64_t next_index(std::mt19937_64& rng, std::uint64_t n) {
    const std::uint64_t limit = std::mt19937_64::max() - std::mt19937_64::max() % n;
    std::uint64_t v = rng();
    while (v >= limit) v = rng();
    return v % n;
}

} // namespace railsched
