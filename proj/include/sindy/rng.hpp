// Copyright 2026-present the sindy-ensemble authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SINDY_RNG_HPP
#define SINDY_RNG_HPP

#include <cmath>
#include <cstdint>

namespace sindy {

/// Counter-based generator (xoshiro-style output over a splitmix64 stream).
/// Draw routines are hand-rolled so that identical seeds produce identical
/// streams on every platform and standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Warm up so that small seeds diverge immediately.
        next_u64();
        next_u64();
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53-bit resolution.
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi] inclusive, rejection-sampled (unbiased).
    std::uint64_t uniform_u64(std::uint64_t lo, std::uint64_t hi) {
        const std::uint64_t range = hi - lo + 1;  // hi >= lo; range 0 means full 2^64
        if (range == 0) return next_u64();
        const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % range) - 1;
        std::uint64_t v = next_u64();
        while (v > limit) v = next_u64();
        return lo + v % range;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    /// Standard normal via Box-Muller (single value per call, no caching).
    double gaussian() {
        double u1 = next_double();
        while (u1 <= 0.0) u1 = next_double();
        const double u2 = next_double();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

private:
    std::uint64_t state_;
};

/// Mix a base seed with a stream index; used to key independent substreams
/// (per ensemble iteration, per sweep row, per subsystem) off one CLI seed.
/// Base and stream are each avalanched before combining so that related
/// (base, stream) pairs cannot alias each other's streams.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    auto mix = [](std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(base + 0x9e3779b97f4a7c15ULL) ^ mix(stream + 0x3c6ef372fe94f82aULL));
}

}  // namespace sindy

#endif
