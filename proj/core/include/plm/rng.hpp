// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>

namespace plm {

/// Deterministic pseudo-random generator used for every random draw in the
/// library, so that a (config, seed) pair reproduces bit-identical runs on
/// any platform.
///
/// The core is the xorshift64* shift-register generator:
///
///     s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;
///     output = s * 2685821657736338717
///
/// The raw seed is conditioned through one splitmix64 step so that small
/// consecutive seeds (0, 1, 2, ...) still start from well-mixed states.
/// The state is kept nonzero. Floating-point draws use the top 53 bits,
/// normal deviates use the Box-Muller transform with two fresh uniforms
/// per call; the number of raw draws per call is therefore fixed.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {
        if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
    }

    /// Derives an independent generator for sub-stream `stream` of `seed`.
    /// Used to decouple e.g. weight initialization from cramming draws.
    static Rng stream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(splitmix64(seed) ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 2685821657736338717ULL;
    }

    /// Uniform double in [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal deviate (Box-Muller, cosine branch).
    double normal() {
        const double u1 = uniform01();            // 1 - u1 is in (0, 1]
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log1p(-u1));
        return r * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    /// Uniform index in [0, n). n must be positive.
    std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

private:
    static std::uint64_t splitmix64(std::uint64_t x) {
        x += 0x9E3779B97F4A7C15ULL;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
        return x ^ (x >> 31);
    }

    std::uint64_t state_;
};

}  // namespace plm
