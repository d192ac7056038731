#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>

namespace reworkbench {

/// Deterministic 64-bit generator used for every sampling operation in the
/// project: xoshiro256** (Blackman/Vigna), state expanded from the user seed
/// with splitmix64. The integer stream is bit-exact across platforms, so a
/// (spec, seed) pair always reproduces the same layout. Floating-point draws
/// (normal, exponential) go through libm and are reproducible up to libm
/// rounding; emitted sidecar files record the realized indices for exact
/// replay.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& word : state_) {
            // splitmix64
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Unbiased uniform integer in [0, bound).
    std::uint64_t next_below(std::uint64_t bound) {
        if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
        const std::uint64_t threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            const std::uint64_t r = next();
            if (r >= threshold) return r % bound;
        }
    }

    /// Normal(mean, sigma^2) via Box-Muller (cosine branch).
    double next_normal(double mean, double sigma) {
        const double u1 = 1.0 - next_double();  // (0, 1]
        const double u2 = next_double();
        return mean + sigma * std::sqrt(-2.0 * std::log(u1)) *
                          std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Exponential with the given scale (mean), inverse-CDF.
    double next_exponential(double scale) {
        const double u = next_double();  // [0, 1)
        return -scale * std::log(1.0 - u);
    }

private:
    static constexpr std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4];
};

/// Stateless 64-bit mix, for per-item decisions keyed on (seed, id).
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Uniform [0,1) derived from mix64, used for seeded Bernoulli decisions.
inline double mix64_unit(std::uint64_t x) {
    return static_cast<double>(mix64(x) >> 11) * 0x1.0p-53;
}

}  // namespace reworkbench
