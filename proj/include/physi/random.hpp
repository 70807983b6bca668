// SPDX-License-Identifier: Apache-2.0
//
// physi - GSVD precoding for MIMO broadcast channels with integrated services
// Copyright (C) 2026 The physi authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef PHYSI_RANDOM_HPP
#define PHYSI_RANDOM_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <utility>

namespace physi {

/// SplitMix64 used as a counter-based generator: draw k (k = 1, 2, ...) is
/// mix64(seed + k * 0x9E3779B97F4A7C15), where mix64 is the SplitMix64
/// finalizer. The stream is fully determined by (seed, k), so it is
/// reproducible on every platform with IEEE-754 doubles.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64()
    {
        ++counter_;
        return mix64(seed_ + counter_ * kGolden);
    }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Two independent standard normals by the Box-Muller transform on
    /// (u1, u2) = (1 - uniform(), uniform()), so u1 lies in (0, 1].
    std::pair<double, double> normal_pair()
    {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        return {radius * std::cos(angle), radius * std::sin(angle)};
    }

    /// Circularly symmetric complex normal with unit variance: (x + i y) / sqrt(2).
    std::complex<double> complex_normal()
    {
        const auto [x, y] = normal_pair();
        return {x * std::numbers::sqrt2 / 2.0, y * std::numbers::sqrt2 / 2.0};
    }

    std::uint64_t counter() const { return counter_; }

    static constexpr std::uint64_t mix64(std::uint64_t z)
    {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
};

} // namespace physi

#endif
