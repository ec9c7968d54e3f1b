// SPDX-License-Identifier: Apache-2.0
//
// rkamimo: randomized Kaczmarz receive combining for massive MIMO uplink
// Copyright (C) 2026 The rkamimo authors
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


#ifndef RKAMIMO_RANDOM_HPP
#define RKAMIMO_RANDOM_HPP

#include "core.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace rkamimo {

// splitmix64 finalizer; used to mix a master seed with stream coordinates.
inline constexpr std::uint64_t mix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derive an independent stream seed from a master seed and a coordinate
/// path such as (purpose, drop, trial, ue). Order-sensitive, so the same path
/// always maps to the same stream regardless of which worker asks for it.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path)
{
    std::uint64_t h = mix64(master);
    for (auto c : path) {
        h = mix64(h ^ mix64(c + 0x632be59bd9b4e019ULL));
    }
    return h;
}

/// A random stream: a 64-bit Mersenne twister plus the distributions the
/// simulator draws from. Not thread-safe; give each task its own stream.
class Rng {
public:
    using engine_type = std::mt19937_64;
    using result_type = engine_type::result_type;

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    static Rng derive(std::uint64_t master, std::initializer_list<std::uint64_t> path)
    {
        return Rng(derive_seed(master, path));
    }

    static constexpr result_type min() { return engine_type::min(); }
    static constexpr result_type max() { return engine_type::max(); }
    result_type operator()() { return engine_(); }

    /// Uniform on [0, 1).
    double uniform() { return std::generate_canonical<double, 53>(engine_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double normal(double mean = 0.0, double stddev = 1.0)
    {
        return mean + stddev * normal_(engine_);
    }

    /// Circularly-symmetric complex Gaussian CN(0, variance).
    cplx cnormal(double variance = 1.0)
    {
        const double s = std::sqrt(variance / 2.0);
        const double re = normal_(engine_);
        const double im = normal_(engine_);
        return {s * re, s * im};
    }

    CVector cnormal_vector(Index n, double variance = 1.0)
    {
        CVector v(n);
        for (Index i = 0; i < n; ++i) {
            v(i) = cnormal(variance);
        }
        return v;
    }

    CMatrix cnormal_matrix(Index rows, Index cols, double variance = 1.0)
    {
        CMatrix m(rows, cols);
        for (Index j = 0; j < cols; ++j) {
            for (Index i = 0; i < rows; ++i) {
                m(i, j) = cnormal(variance);
            }
        }
        return m;
    }

private:
    engine_type engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// Stream purposes, the first coordinate of every derived path.
namespace stream {
inline constexpr std::uint64_t drop = 1;
inline constexpr std::uint64_t shadowing = 2;
inline constexpr std::uint64_t channel = 3;
inline constexpr std::uint64_t pilot_noise = 4;
inline constexpr std::uint64_t rka_rows = 5;
inline constexpr std::uint64_t instance = 6;
} // namespace stream

} // namespace rkamimo

#endif
