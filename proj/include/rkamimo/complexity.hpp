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


#ifndef RKAMIMO_COMPLEXITY_HPP
#define RKAMIMO_COMPLEXITY_HPP

// Operation counts per coherence block, in complex multiplications and
// divisions. All counts are exact integers for integer inputs.

#include "core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rkamimo {

enum class Scheme { ZF, RZF, RKA };

/// Flexible (one processing unit) vs time-saving (K parallel units)
/// hardware. Counted operations are identical; only the tag differs.
enum class HardwareMode { FLS, TSS };

inline std::string to_string(Scheme s)
{
    switch (s) {
    case Scheme::ZF: return "zf";
    case Scheme::RZF: return "rzf";
    case Scheme::RKA: return "rka";
    }
    return "?";
}

inline std::string to_string(HardwareMode m) { return m == HardwareMode::FLS ? "fls" : "tss"; }

struct ComplexityReport {
    Scheme scheme = Scheme::RZF;
    HardwareMode mode = HardwareMode::FLS;
    std::int64_t combining_mults = 0;
    std::int64_t combining_divs = 0;
    std::int64_t reception_mults = 0;
    std::int64_t dl_mults = 0;

    std::int64_t total() const { return combining_mults + combining_divs + reception_mults + dl_mults; }
    std::int64_t ul_total() const { return combining_mults + combining_divs + reception_mults; }
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b)
{
    std::int64_t r = 0;
    if (__builtin_mul_overflow(a, b, &r)) {
        throw std::overflow_error("complexity: operation count overflows 64 bits");
    }
    return r;
}

inline std::int64_t mul3(std::int64_t a, std::int64_t b, std::int64_t c) { return checked_mul(checked_mul(a, b), c); }

inline void require_positive(std::int64_t v, const char* what)
{
    if (v < 1) {
        throw std::invalid_argument(std::string("complexity: ") + what + " must be >= 1");
    }
}

// (K^3 - K) / 3, exact since K^3 - K = (K-1) K (K+1).
inline std::int64_t cube_term(std::int64_t K) { return mul3(K - 1, K, K + 1) / 3; }

inline ComplexityReport canonical_cost(Scheme s, std::int64_t M, std::int64_t K, std::int64_t tau_ul)
{
    require_positive(M, "M");
    require_positive(K, "K");
    require_positive(tau_ul, "tau_ul");
    ComplexityReport r;
    r.scheme = s;
    // 3K^2M/2 + cKM/2 with c = 1 (ZF) or 3 (RZF): KM(3K + c)/2, always even.
    const std::int64_t c = (s == Scheme::ZF) ? 1 : 3;
    r.combining_mults = checked_mul(checked_mul(K, M), 3 * K + c) / 2 + cube_term(K);
    r.combining_divs = K;
    r.reception_mults = mul3(tau_ul, M, K);
    return r;
}

} // namespace detail

inline ComplexityReport cost_zf(std::int64_t M, std::int64_t K, std::int64_t tau_ul)
{
    return detail::canonical_cost(Scheme::ZF, M, K, tau_ul);
}

inline ComplexityReport cost_rzf(std::int64_t M, std::int64_t K, std::int64_t tau_ul)
{
    return detail::canonical_cost(Scheme::RZF, M, K, tau_ul);
}

/// Kaczmarz combiner: M T per UE-independent iteration budget plus 2MK for
/// the sampling table; reception adds MK^2 to materialize V = Ghat D.
inline ComplexityReport cost_rka(std::int64_t M, std::int64_t K, std::int64_t T, std::int64_t tau_ul,
                                 HardwareMode mode = HardwareMode::FLS)
{
    detail::require_positive(M, "M");
    detail::require_positive(K, "K");
    detail::require_positive(tau_ul, "tau_ul");
    if (T < 0) {
        throw std::invalid_argument("complexity: T must be >= 0");
    }
    ComplexityReport r;
    r.scheme = Scheme::RKA;
    r.mode = mode;
    r.combining_mults = detail::checked_mul(M, T) + detail::mul3(2, M, K);
    r.combining_divs = 0;
    r.reception_mults = detail::mul3(tau_ul, M, K) + detail::mul3(M, K, K);
    return r;
}

/// Downlink: MK to normalize the precoder plus tau_dl M K to precode.
inline std::int64_t dl_cost(std::int64_t M, std::int64_t K, std::int64_t tau_dl)
{
    detail::require_positive(M, "M");
    detail::require_positive(K, "K");
    if (tau_dl < 0) {
        throw std::invalid_argument("complexity: tau_dl must be >= 0");
    }
    return detail::checked_mul(M, K) + detail::mul3(tau_dl, M, K);
}

inline ComplexityReport with_downlink(ComplexityReport r, std::int64_t M, std::int64_t K, std::int64_t tau_dl)
{
    r.dl_mults = dl_cost(M, K, tau_dl);
    return r;
}

/// Iteration budget at which the Kaczmarz combiner costs as much as the
/// canonical scheme:
///   ZF : K^3/(3M) + K^2/2 + (4K - 9KM)/(6M)
///   RZF: K^3/(3M) + K^2/2 + (4K - 3KM)/(6M)
/// Real K is allowed (fractional loading).
inline double t_upper(double M, double K, Scheme target)
{
    if (!(M >= 1.0) || !(K >= 1.0)) {
        throw std::invalid_argument("t_upper: M and K must be >= 1");
    }
    if (target == Scheme::RKA) {
        throw std::invalid_argument("t_upper: target must be ZF or RZF");
    }
    const double c = (target == Scheme::ZF) ? 9.0 : 3.0;
    return (2.0 * K * K * K + 3.0 * K * K * M + 4.0 * K - c * K * M) / (6.0 * M);
}

/// Integer overload, evaluated as a single rational number over 6M.
inline double t_upper(std::int64_t M, std::int64_t K, Scheme target)
{
    detail::require_positive(M, "M");
    detail::require_positive(K, "K");
    if (target == Scheme::RKA) {
        throw std::invalid_argument("t_upper: target must be ZF or RZF");
    }
    const std::int64_t c = (target == Scheme::ZF) ? 9 : 3;
    const std::int64_t num = detail::mul3(2 * K, K, K) + detail::mul3(3 * K, K, M) + 4 * K - detail::mul3(c, K, M);
    return static_cast<double>(num) / static_cast<double>(detail::checked_mul(6, M));
}

inline double t_upper(int M, int K, Scheme target)
{
    return t_upper(static_cast<std::int64_t>(M), static_cast<std::int64_t>(K), target);
}

/// How K follows M at a fixed loading factor.
enum class LoadingRule {
    Continuous, // K = loading * M, a real number
    Nearest,    // K = round(loading * M), at least 1
};

inline double users_for(double loading, std::int64_t M, LoadingRule rule)
{
    const double K = loading * static_cast<double>(M);
    if (rule == LoadingRule::Continuous) {
        return K;
    }
    return std::max(1.0, std::round(K));
}

/// Smallest M whose upper bound reaches T_target at the given loading factor.
inline std::int64_t tradeoff_threshold(double loading, double T_target, Scheme target,
                                       LoadingRule rule = LoadingRule::Continuous, std::int64_t max_M = 1 << 20)
{
    if (!(loading > 0.0 && loading <= 1.0)) {
        throw std::invalid_argument("tradeoff_threshold: loading factor must lie in (0, 1]");
    }
    if (!(T_target >= 1.0)) {
        throw std::invalid_argument("tradeoff_threshold: T_target must be >= 1");
    }
    for (std::int64_t M = 1; M <= max_M; ++M) {
        const double K = users_for(loading, M, rule);
        if (K < 1.0) {
            continue;
        }
        if (t_upper(static_cast<double>(M), K, target) >= T_target) {
            return M;
        }
    }
    throw std::domain_error("tradeoff_threshold: no M up to the search limit reaches the target");
}

/// Complexity saving of the Kaczmarz combiner at a measured iteration count.
inline double complexity_ratio(double t_bound, double t_measured)
{
    if (!(t_measured > 0.0)) {
        throw std::invalid_argument("complexity_ratio: measured iterations must be positive");
    }
    return t_bound / t_measured;
}

struct TradeoffRow {
    double loading = 0.0;
    std::int64_t M = 0;
    double K = 0.0;
    double t_upper_zf = 0.0;
    double t_upper_rzf = 0.0;
    std::optional<double> T_target_10;
    std::optional<double> T_target_1;
};

/// Upper-bound curves over an antenna grid for one loading factor.
inline std::vector<TradeoffRow> tradeoff_curve(double loading, const std::vector<std::int64_t>& M_grid,
                                               LoadingRule rule = LoadingRule::Continuous,
                                               std::optional<double> target_10 = std::nullopt,
                                               std::optional<double> target_1 = std::nullopt)
{
    if (!(loading > 0.0 && loading <= 1.0)) {
        throw std::invalid_argument("tradeoff_curve: loading factor must lie in (0, 1]");
    }
    std::vector<TradeoffRow> rows;
    rows.reserve(M_grid.size());
    for (const std::int64_t M : M_grid) {
        const double K = users_for(loading, M, rule);
        if (K < 1.0) {
            continue;
        }
        TradeoffRow r;
        r.loading = loading;
        r.M = M;
        r.K = K;
        r.t_upper_zf = t_upper(static_cast<double>(M), K, Scheme::ZF);
        r.t_upper_rzf = t_upper(static_cast<double>(M), K, Scheme::RZF);
        r.T_target_10 = target_10;
        r.T_target_1 = target_1;
        rows.push_back(r);
    }
    return rows;
}

} // namespace rkamimo

#endif
