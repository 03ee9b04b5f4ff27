#pragma once

#include <cstdint>
#include <cmath>
#include <numbers>

#include "lsmor/errors.hpp"

namespace lsmor {

// Counter-based generator: the k-th output is a pure function of
// (seed, stream, k), so independently keyed streams can be drawn in any
// order or from any thread and still reproduce bit-identically.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : key_(mix(mix(seed + 0x632be59bd9b4e019ULL) ^
                   mix(stream + 0x9e3779b97f4a7c15ULL))) {}

    std::uint64_t next_u64() {
        counter_ += 0x9e3779b97f4a7c15ULL;
        return mix(key_ ^ counter_);
    }

    // Uniform on (0, 1]; never returns 0 so it is safe under log().
    double uniform_open01() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    }

    // Uniform on [0, 1).
    double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Standard normal via Box-Muller; always consumes exactly two uniforms.
    double normal() {
        const double u1 = uniform_open01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    // Poisson by CDF inversion; exact and cheap for the small means used by
    // the per-step jump counts.
    int poisson(double mean) {
        if (mean < 0.0 || !std::isfinite(mean)) {
            throw InvalidSpec("CounterRng::poisson: mean must be finite and nonnegative");
        }
        if (mean == 0.0) return 0;
        if (mean > 30.0) {
            throw InvalidSpec("CounterRng::poisson: inversion sampler requires mean <= 30");
        }
        const double u = uniform01();
        double p = std::exp(-mean);
        double cdf = p;
        int k = 0;
        while (u > cdf && k < 200) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace lsmor
