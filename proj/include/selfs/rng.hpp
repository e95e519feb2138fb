#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace selfs {

// std::mt19937_64 is fully specified by the standard, but the library
// distributions are not, so the draws below are built from raw engine output
// to keep every seeded result identical across platforms.

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Independent engine for stream `stream` of a seeded family (one per bootstrap iteration, time step, ...).
inline std::mt19937_64 stream_engine(std::uint64_t seed, std::uint64_t stream) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull)));
}

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& eng, double lo, double hi) { return lo + (hi - lo) * uniform01(eng); }

/// Unbiased integer in [0, n) by rejection.
inline std::uint64_t uniform_index(std::mt19937_64& eng, std::uint64_t n) {
    const std::uint64_t limit = n == 0 ? 0 : (~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n);
    std::uint64_t x = eng();
    while (x > limit) x = eng();
    return x % n;
}

/// Box-Muller; consumes exactly two engine outputs per call.
inline double standard_normal(std::mt19937_64& eng) {
    const double u1 = 1.0 - uniform01(eng);  // (0, 1]
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline bool bernoulli(std::mt19937_64& eng, double p) { return uniform01(eng) < p; }

}  // namespace selfs
