// SPDX-License-Identifier: Apache-2.0
//
// camimo: portable random number generation
//
// std::mt19937_64 is bit-portable, but the std:: distributions are
// implementation-defined, so uniforms and normals are mapped explicitly here.
// Byte-identical output across platforms and worker counts depends on it.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace camimo {

// splitmix64 finalizer; the standard 64-bit avalanche mix.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

// Deterministic per-work-item seed from (base seed, sweep index, realization
// index); independent of scheme list and worker scheduling.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t sweep_idx,
                                 std::uint64_t realization_idx) {
    std::uint64_t s = splitmix64(base);
    s = splitmix64(s ^ (sweep_idx + 0x9E3779B97F4A7C15ULL));
    s = splitmix64(s ^ (realization_idx + 0xD1B54A32D192ED03ULL));
    return s;
}

class Rng {
  public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // uniform on (0, 1]: ((x >> 11) + 1) * 2^-53; never 0, so log() is safe
    double uniform01() {
        const std::uint64_t x = eng_();
        return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, cosine branch only: two uniforms per normal, no cached state
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace camimo
