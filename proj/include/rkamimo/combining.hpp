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


#ifndef RKAMIMO_COMBINING_HPP
#define RKAMIMO_COMBINING_HPP

#include "core.hpp"
#include "random.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rkamimo {

enum class CombinerMethod { ZF, RZF, RkaHybrid, RkaPlain, RkaCyclic };

inline std::string to_string(CombinerMethod m)
{
    switch (m) {
    case CombinerMethod::ZF: return "ZF";
    case CombinerMethod::RZF: return "RZF";
    case CombinerMethod::RkaHybrid: return "RKA_HYBRID";
    case CombinerMethod::RkaPlain: return "RKA_PLAIN";
    case CombinerMethod::RkaCyclic: return "RKA_CYCLIC";
    }
    return "?";
}

/// Receive combining matrix V (M x K). Kaczmarz-based combiners also carry
/// the K x K factor D with V = Ghat D.
struct Combiner {
    CMatrix V;
    CombinerMethod method = CombinerMethod::RZF;
    std::optional<CMatrix> D;
};

namespace detail {

// Hermitian positive-definite solve of (Ghat^H Ghat + xi I) X = Ghat^H.
inline CMatrix regularized_pinv_adjoint(const CMatrix& Ghat, double xi, const char* who)
{
    if (!Ghat.allFinite()) {
        throw numerical_error(std::string(who) + ": channel estimate has non-finite entries");
    }
    if (xi < 0.0) {
        throw std::invalid_argument(std::string(who) + ": xi must be >= 0");
    }
    const Index K = Ghat.cols();
    CMatrix gram = Ghat.adjoint() * Ghat;
    gram.diagonal().array() += xi;
    if (xi == 0.0) {
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
        const double lmax = eig.eigenvalues().maxCoeff();
        const double lmin = eig.eigenvalues().minCoeff();
        const double floor = lmax * static_cast<double>(std::max(Ghat.rows(), K)) *
                             std::numeric_limits<double>::epsilon();
        if (!(lmax > 0.0) || lmin <= floor) {
            const double cond = lmin > 0.0 ? std::sqrt(lmax / lmin) : std::numeric_limits<double>::infinity();
            throw numerical_error(std::string(who) + ": channel estimate is rank deficient (condition number " +
                                  std::to_string(cond) + ")");
        }
    }
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw numerical_error(std::string(who) + ": Gram matrix is not positive definite");
    }
    return llt.solve(Ghat.adjoint());
}

} // namespace detail

/// V = Ghat (Ghat^H Ghat + xi I)^{-1}.
inline Combiner rzf_combiner(const CMatrix& Ghat, double xi)
{
    Combiner c;
    c.V = detail::regularized_pinv_adjoint(Ghat, xi, "rzf_combiner").adjoint();
    c.method = CombinerMethod::RZF;
    return c;
}

/// V = Ghat (Ghat^H Ghat)^{-1}; requires full column rank.
inline Combiner zf_combiner(const CMatrix& Ghat)
{
    Combiner c;
    c.V = detail::regularized_pinv_adjoint(Ghat, 0.0, "zf_combiner").adjoint();
    c.method = CombinerMethod::ZF;
    return c;
}

/// Closed-form target of the k-th Kaczmarz solve: d_k = (Ghat^H Ghat + xi I)^{-1} e_k
/// as the columns of D, and V = Ghat D.
struct RzfSolution {
    CMatrix V;
    CMatrix D;
};

inline RzfSolution rzf_solution(const CMatrix& Ghat, double xi)
{
    const Index K = Ghat.cols();
    CMatrix gram = Ghat.adjoint() * Ghat;
    gram.diagonal().array() += xi;
    Eigen::LLT<CMatrix> llt(gram);
    if (llt.info() != Eigen::Success) {
        throw numerical_error("rzf_solution: Gram matrix is not positive definite");
    }
    RzfSolution s;
    s.D = llt.solve(CMatrix::Identity(K, K));
    s.V = Ghat * s.D;
    return s;
}

/// Row-selection probabilities P_r = (||g_r||^2 + xi) / (||G||_F^2 + K xi).
inline RVector sample_probabilities(const CMatrix& Ghat, double xi)
{
    const Index K = Ghat.cols();
    if (K < 1) {
        throw std::invalid_argument("sample_probabilities: empty channel matrix");
    }
    RVector p = Ghat.colwise().squaredNorm().transpose();
    p.array() += xi;
    const double total = p.sum();
    if (!(total > 0.0) || !std::isfinite(total)) {
        throw std::domain_error("sample_probabilities: zero channel with xi = 0");
    }
    return p / total;
}

enum class RkaInit { Hybrid, Plain };
enum class RkaSchedule { Randomized, Cyclic };

struct RkaOptions {
    Index iterations = 1;   // T_rKA per UE
    double xi = 0.0;
    RkaInit init = RkaInit::Hybrid;
    RkaSchedule schedule = RkaSchedule::Randomized;
    bool shared_rows = false;
    // Replaces the energy-proportional row distribution when set (length K,
    // nonnegative, summing to one). Zero entries are never drawn.
    std::optional<RVector> probabilities;

    void validate() const
    {
        if (iterations < 1) {
            throw std::invalid_argument("rka: iteration budget must be >= 1");
        }
        if (!(xi >= 0.0)) {
            throw std::invalid_argument("rka: xi must be >= 0");
        }
    }

    CombinerMethod method() const
    {
        if (schedule == RkaSchedule::Cyclic) return CombinerMethod::RkaCyclic;
        return init == RkaInit::Hybrid ? CombinerMethod::RkaHybrid : CombinerMethod::RkaPlain;
    }
};

/// One step of the k-th solve, as seen by an observer: the state after the
/// update at iteration t (0-based) that used row `row` and residual `eta`.
struct RkaStep {
    Index k;
    Index t;
    Index row;
    cplx eta;
    const CVector& u;
    const CVector& z;
};

struct NoRkaObserver {
    void operator()(const RkaStep&) const {}
};

namespace detail {

// Inverse-CDF draw over a precomputed cumulative distribution. Rows with zero
// probability own an empty interval and are never returned.
inline Index draw_row(const std::vector<double>& cdf, Index last_positive, double u)
{
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    const auto r = static_cast<Index>(it - cdf.begin());
    return std::min(r, last_positive);
}

inline std::uint64_t row_stream_seed(std::uint64_t seed, bool shared, Index k)
{
    return shared ? derive_seed(seed, {stream::rka_rows, ~0ULL})
                  : derive_seed(seed, {stream::rka_rows, static_cast<std::uint64_t>(k)});
}

} // namespace detail

/// Parallel randomized-Kaczmarz emulation of the RZF combiner.
///
/// Solve k runs T iterations on [Ghat^H, sqrt(xi) I] c = e_k with
/// c = [u; sqrt(xi) z], starting from zero. Each iteration picks a row r
/// (row k first under hybrid init, then by `sample_probabilities` or
/// cyclically), computes
///     eta = ([e_k]_r - <g_r, u> - xi z_r) / (||g_r||^2 + xi)
/// and updates u += eta g_r, z_r += eta. Column k of D is the final z.
///
/// `checkpoints` (ascending, each <= opts.iterations) selects the iteration
/// counts at which D is captured; one D per checkpoint is returned. Because a
/// longer run replays the same row stream, the captures equal separate runs
/// with those budgets. Solve k draws rows from its own stream derived from
/// `seed` (or one shared stream when opts.shared_rows), so the result does
/// not depend on the order in which solves execute.
template <class Observer = NoRkaObserver>
std::vector<CMatrix> rka_parl_checkpoints(const CMatrix& Ghat, const RkaOptions& opts,
                                          const std::vector<Index>& checkpoints, std::uint64_t seed,
                                          Observer&& observer = Observer{})
{
    opts.validate();
    const Index M = Ghat.rows();
    const Index K = Ghat.cols();
    if (K < 1) {
        throw std::invalid_argument("rka_parl: K must be >= 1");
    }
    if (!Ghat.allFinite()) {
        throw numerical_error("rka_parl: channel estimate has non-finite entries");
    }
    if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
        (!checkpoints.empty() && (checkpoints.front() < 0 || checkpoints.back() > opts.iterations))) {
        throw std::invalid_argument("rka_parl: checkpoints must be ascending within [0, T]");
    }

    // Per coherence block: squared row norms, denominators and the sampling CDF.
    RVector denom = Ghat.colwise().squaredNorm().transpose();
    denom.array() += opts.xi;
    std::vector<double> cdf;
    Index last_positive = 0;
    if (opts.schedule == RkaSchedule::Randomized) {
        if (opts.probabilities) {
            const RVector& q = *opts.probabilities;
            if (q.size() != K || (q.array() < 0.0).any() || !q.allFinite() || std::abs(q.sum() - 1.0) > 1e-12) {
                throw std::invalid_argument("rka_parl: probability override must be a length-K distribution");
            }
        }
        const RVector p = opts.probabilities ? *opts.probabilities : sample_probabilities(Ghat, opts.xi);
        cdf.resize(static_cast<std::size_t>(K));
        double acc = 0.0;
        for (Index r = 0; r < K; ++r) {
            acc += p(r);
            cdf[static_cast<std::size_t>(r)] = acc;
            if (p(r) > 0.0) {
                last_positive = r;
            }
        }
    }

    std::vector<CMatrix> out(checkpoints.size(), CMatrix::Zero(K, K));
    CVector u(M);
    CVector z(K);
    for (Index k = 0; k < K; ++k) {
        Rng rows(detail::row_stream_seed(seed, opts.shared_rows, k));
        u.setZero();
        z.setZero();
        std::size_t next = 0;
        while (next < checkpoints.size() && checkpoints[next] == 0) {
            ++next; // zero iterations: column stays zero
        }
        for (Index t = 0; t < opts.iterations; ++t) {
            Index r = 0;
            if (t == 0 && opts.init == RkaInit::Hybrid) {
                r = k;
            } else if (opts.schedule == RkaSchedule::Cyclic) {
                r = t % K;
            } else {
                r = detail::draw_row(cdf, last_positive, rows.uniform());
            }
            const double den = denom(r);
            if (!(den > 0.0)) {
                throw numerical_error("rka_parl: selected row " + std::to_string(r) +
                                      " has zero energy and xi = 0");
            }
            const cplx target = (r == k) ? cplx(1.0, 0.0) : cplx(0.0, 0.0);
            const cplx eta = (target - Ghat.col(r).dot(u) - opts.xi * z(r)) / den;
            u.noalias() += eta * Ghat.col(r);
            z(r) += eta;
            observer(RkaStep{k, t, r, eta, u, z});
            while (next < checkpoints.size() && checkpoints[next] == t + 1) {
                out[next].col(k) = z;
                ++next;
            }
        }
    }
    return out;
}

/// Combiner from a single Kaczmarz run with budget opts.iterations.
template <class Observer = NoRkaObserver>
Combiner rka_parl(const CMatrix& Ghat, const RkaOptions& opts, std::uint64_t seed,
                  Observer&& observer = Observer{})
{
    auto D = rka_parl_checkpoints(Ghat, opts, {opts.iterations}, seed, std::forward<Observer>(observer));
    Combiner c;
    c.V = Ghat * D.front();
    c.D = std::move(D.front());
    c.method = opts.method();
    return c;
}

template <class Observer = NoRkaObserver>
Combiner rka_parl(const CMatrix& Ghat, const RkaOptions& opts, Rng& rng, Observer&& observer = Observer{})
{
    return rka_parl(Ghat, opts, static_cast<std::uint64_t>(rng()), std::forward<Observer>(observer));
}

/// Distance of the k-th solve's state from its closed-form target, measured on
/// c = [u; sqrt(xi) z] (xi > 0) or [u; z] (xi = 0).
inline double state_gap(const CVector& u, const CVector& z, const RzfSolution& target, Index k, double xi)
{
    const double zscale = xi > 0.0 ? xi : 1.0;
    return std::sqrt((u - target.V.col(k)).squaredNorm() + zscale * (z - target.D.col(k)).squaredNorm());
}

inline double state_norm(const RzfSolution& target, Index k, double xi)
{
    const double zscale = xi > 0.0 ? xi : 1.0;
    return std::sqrt(target.V.col(k).squaredNorm() + zscale * target.D.col(k).squaredNorm());
}

/// Observer that records (t, k, r, |eta|, gap) rows; gap is NaN without an oracle.
class RkaTraceRecorder {
public:
    struct Row {
        Index t;
        Index k;
        Index r;
        double abs_eta;
        double gap;
    };

    RkaTraceRecorder() = default;
    RkaTraceRecorder(RzfSolution oracle, double xi) : oracle_(std::move(oracle)), xi_(xi) {}

    void operator()(const RkaStep& s)
    {
        const double gap = oracle_ ? state_gap(s.u, s.z, *oracle_, s.k, xi_)
                                   : std::numeric_limits<double>::quiet_NaN();
        rows_.push_back({s.t, s.k, s.row, std::abs(s.eta), gap});
    }

    const std::vector<Row>& rows() const { return rows_; }

    /// CSV with header `t,k,r,abs_eta,gap`; t counts completed iterations
    /// (1-based) and k, r are 0-based UE / row indices.
    void write_csv(std::ostream& os) const
    {
        os << "t,k,r,abs_eta,gap\n";
        char buf[96];
        for (const auto& row : rows_) {
            std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%.9g,%.9g\n", static_cast<long long>(row.t + 1),
                          static_cast<long long>(row.k), static_cast<long long>(row.r), row.abs_eta, row.gap);
            os << buf;
        }
    }

private:
    std::optional<RzfSolution> oracle_;
    double xi_ = 0.0;
    std::vector<Row> rows_;
};

/// s_hat = V^H y.
inline CVector recover_signals(const Combiner& combiner, const CVector& y)
{
    if (combiner.V.rows() != y.size()) {
        throw std::invalid_argument("recover_signals: shape mismatch");
    }
    return combiner.V.adjoint() * y;
}

/// Batch form for a block of received vectors (columns of Y); V is formed
/// once and reused for every symbol.
inline CMatrix recover_signals(const Combiner& combiner, const CMatrix& Y)
{
    if (combiner.V.rows() != Y.rows()) {
        throw std::invalid_argument("recover_signals: shape mismatch");
    }
    return combiner.V.adjoint() * Y;
}

/// UL-DL duality: w_k = v_k / ||v_k||.
inline CMatrix precoder_from_combiner(const Combiner& combiner)
{
    CMatrix W = combiner.V;
    for (Index k = 0; k < W.cols(); ++k) {
        const double n = W.col(k).norm();
        if (!(n > 0.0) || !std::isfinite(n)) {
            throw numerical_error("precoder_from_combiner: combining vector " + std::to_string(k) +
                                  " is zero (failed solve?)");
        }
        W.col(k) /= n;
    }
    return W;
}

/// x = W varsigma.
inline CVector precode_signal(const CMatrix& W, const CVector& symbols)
{
    if (W.cols() != symbols.size()) {
        throw std::invalid_argument("precode_signal: shape mismatch");
    }
    for (Index k = 0; k < W.cols(); ++k) {
        if (std::abs(W.col(k).norm() - 1.0) > 1e-9) {
            throw std::invalid_argument("precode_signal: precoding columns must have unit norm");
        }
    }
    return W * symbols;
}

} // namespace rkamimo

#endif
