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


#ifndef RKAMIMO_ANALYSIS_HPP
#define RKAMIMO_ANALYSIS_HPP

#include "channel.hpp"
#include "combining.hpp"
#include "estimation.hpp"
#include "parallel.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <type_traits>
#include <utility>
#include <vector>

namespace rkamimo {

// ---------------------------------------------------------------------------
// Spectral efficiency (use-and-forget bound)
// ---------------------------------------------------------------------------

struct SeEstimate {
    RVector sinr;        // linear, per UE
    RVector se;          // bit/s/Hz, per UE
    RVector sinr_stderr;
    RVector se_stderr;
    double prefactor = 1.0; // tau_ul / tau_c
    Index trials = 0;

    double mean_se() const { return se.size() ? se.mean() : 0.0; }
};

/// Accumulates the three expectations of the effective SINR,
/// E{v_k^H g_k}, sum_i E{|v_k^H g_i|^2} and E{||v_k||^2}, one realization at
/// a time. Per-trial samples are kept for jackknife standard errors.
class SeAccumulator {
public:
    explicit SeAccumulator(Index K) : K_(K) {}

    void add(const CMatrix& V, const CMatrix& G)
    {
        if (V.cols() != K_ || G.cols() != K_ || V.rows() != G.rows()) {
            throw std::invalid_argument("SeAccumulator: shape mismatch");
        }
        const CMatrix VG = V.adjoint() * G; // (k, i) = v_k^H g_i
        for (Index k = 0; k < K_; ++k) {
            gain_.push_back(VG(k, k));
            power_.push_back(VG.row(k).squaredNorm());
            norm_.push_back(V.col(k).squaredNorm());
        }
        ++trials_;
    }

    Index trials() const { return trials_; }

    /// gamma_k = rho |E{v^H g_k}|^2 / (rho sum_i E{|v^H g_i|^2} - rho |E{v^H g_k}|^2 + E{||v||^2}).
    SeEstimate finish(double rho, Index tau_ul, Index tau_c) const
    {
        if (trials_ < 1) {
            throw std::invalid_argument("sinr_se_montecarlo: need at least one trial");
        }
        SeEstimate est;
        est.trials = trials_;
        est.prefactor = static_cast<double>(tau_ul) / static_cast<double>(tau_c);
        est.sinr.resize(K_);
        est.se.resize(K_);
        est.sinr_stderr.resize(K_);
        est.se_stderr.resize(K_);
        const auto n = static_cast<double>(trials_);
        for (Index k = 0; k < K_; ++k) {
            cplx sa = 0.0;
            double sb = 0.0;
            double sc = 0.0;
            for (Index t = 0; t < trials_; ++t) {
                const auto i = static_cast<std::size_t>(t * K_ + k);
                sa += gain_[i];
                sb += power_[i];
                sc += norm_[i];
            }
            est.sinr(k) = sinr_from_means(sa / n, sb / n, sc / n, rho);
            est.se(k) = est.prefactor * std::log2(1.0 + est.sinr(k));
            if (trials_ < 2) {
                est.sinr_stderr(k) = std::numeric_limits<double>::quiet_NaN();
                est.se_stderr(k) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            // Delete-one jackknife.
            double mg = 0.0;
            double ms = 0.0;
            std::vector<double> g(static_cast<std::size_t>(trials_));
            std::vector<double> s(static_cast<std::size_t>(trials_));
            for (Index t = 0; t < trials_; ++t) {
                const auto i = static_cast<std::size_t>(t * K_ + k);
                const double m = n - 1.0;
                const double gi = sinr_from_means((sa - gain_[i]) / m, (sb - power_[i]) / m, (sc - norm_[i]) / m, rho);
                g[static_cast<std::size_t>(t)] = gi;
                s[static_cast<std::size_t>(t)] = est.prefactor * std::log2(1.0 + gi);
                mg += gi;
                ms += s[static_cast<std::size_t>(t)];
            }
            mg /= n;
            ms /= n;
            double vg = 0.0;
            double vs = 0.0;
            for (Index t = 0; t < trials_; ++t) {
                vg += (g[static_cast<std::size_t>(t)] - mg) * (g[static_cast<std::size_t>(t)] - mg);
                vs += (s[static_cast<std::size_t>(t)] - ms) * (s[static_cast<std::size_t>(t)] - ms);
            }
            est.sinr_stderr(k) = std::sqrt((n - 1.0) / n * vg);
            est.se_stderr(k) = std::sqrt((n - 1.0) / n * vs);
        }
        return est;
    }

    static double sinr_from_means(cplx mean_gain, double mean_power, double mean_norm, double rho)
    {
        if (mean_norm == 0.0) {
            return 0.0; // zero combiner: no signal
        }
        const double signal = rho * std::norm(mean_gain);
        const double denom = rho * mean_power - signal + mean_norm;
        const double scale = rho * mean_power + mean_norm;
        if (denom < -1e-15 * scale) {
            throw numerical_error("sinr_se_montecarlo: negative SINR denominator");
        }
        if (!(denom > 0.0)) {
            return std::numeric_limits<double>::infinity();
        }
        return signal / denom;
    }

private:
    Index K_;
    Index trials_ = 0;
    std::vector<cplx> gain_;
    std::vector<double> power_;
    std::vector<double> norm_;
};

/// Monte Carlo SE of one combiner type for a fixed drop (covariance set):
/// every trial draws a fresh channel, pilot observation and estimate, builds
/// the combiner with `factory`, and accumulates the SINR expectations.
/// `factory` is called as factory(estimate) or factory(estimate, rng).
template <class Factory>
SeEstimate sinr_se_montecarlo(const Scenario& scenario, const CovarianceSet& cov, Factory&& factory,
                              Index n_trials, std::uint64_t seed)
{
    const SystemConfig& sys = scenario.system;
    sys.validate();
    if (n_trials < 1) {
        throw std::invalid_argument("sinr_se_montecarlo: n_trials must be >= 1");
    }
    const ChannelSampler sampler(cov);
    const ChannelEstimator estimator(scenario.estimator, cov, sys);
    SeAccumulator acc(cov.num_users());
    for (Index t = 0; t < n_trials; ++t) {
        const auto tt = static_cast<std::uint64_t>(t);
        Rng ch = Rng::derive(seed, {stream::channel, tt});
        Rng noise = Rng::derive(seed, {stream::pilot_noise, tt});
        Rng comb = Rng::derive(seed, {stream::rka_rows, tt});
        const CMatrix G = sampler.sample(ch);
        const ChannelEstimate est = estimator(G, noise);
        Combiner c;
        if constexpr (std::is_invocable_v<Factory&, const ChannelEstimate&, Rng&>) {
            c = factory(est, comb);
        } else {
            c = factory(est);
        }
        acc.add(c.V, G);
    }
    return acc.finish(sys.rho_ul(), sys.tau_ul(), sys.tau_c);
}

// ---------------------------------------------------------------------------
// Average gain
// ---------------------------------------------------------------------------

struct GainReport {
    double kappa_closed = std::numeric_limits<double>::quiet_NaN();
    double kappa_generic = std::numeric_limits<double>::quiet_NaN();
    double kappa_upper = std::numeric_limits<double>::quiet_NaN();
    double iid_lower = std::numeric_limits<double>::quiet_NaN();
    double lambda_min = std::numeric_limits<double>::quiet_NaN();
    double lower_ratio = std::numeric_limits<double>::quiet_NaN(); // lambda_min / ||G||_F^2
};

/// kappa = (lambda_min(G^H G) + xi) / (||G||_F^2 + K xi).
inline GainReport average_gain_closed(const CMatrix& Ghat, double xi)
{
    const Index K = Ghat.cols();
    if (K < 1) {
        throw std::invalid_argument("average_gain_closed: empty channel matrix");
    }
    const CMatrix gram = Ghat.adjoint() * Ghat;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(gram, Eigen::EigenvaluesOnly);
    const double fro2 = Ghat.squaredNorm();
    const double denom = fro2 + static_cast<double>(K) * xi;
    if (!(denom > 0.0)) {
        throw std::domain_error("average_gain_closed: zero channel with xi = 0");
    }
    GainReport g;
    g.lambda_min = std::max(0.0, eig.eigenvalues().minCoeff());
    g.kappa_closed = (g.lambda_min + xi) / denom;
    g.lower_ratio = fro2 > 0.0 ? g.lambda_min / fro2 : 0.0;
    g.kappa_upper = 1.0 / static_cast<double>(K);
    return g;
}

/// Coefficient matrix of the k-th Kaczmarz system, [Ghat^H, sqrt(xi) I_K]
/// (K x (M + K)); its rows are the equations the solver projects onto.
inline CMatrix kaczmarz_system(const CMatrix& Ghat, double xi)
{
    const Index M = Ghat.rows();
    const Index K = Ghat.cols();
    CMatrix A(K, M + K);
    A.leftCols(M) = Ghat.adjoint();
    A.rightCols(K) = CMatrix::Identity(K, K) * std::sqrt(xi);
    return A;
}

/// Energy-proportional row probabilities ||a_z||^2 / ||A||_F^2.
inline RVector energy_probabilities(const CMatrix& A)
{
    RVector p = A.rowwise().squaredNorm();
    const double total = p.sum();
    if (!(total > 0.0)) {
        throw std::domain_error("energy_probabilities: zero matrix");
    }
    return p / total;
}

/// Average gain from its definition: build the averaged rank-1 projector
/// sum_z p_z a_z a_z^H / ||a_z||^2 (a_z = row z of A, conjugated) and return
/// its smallest eigenvalue restricted to the row space of A.
inline double average_gain_generic(const CMatrix& A, const RVector& p)
{
    const Index m = A.rows();
    const Index n = A.cols();
    if (p.size() != m) {
        throw std::invalid_argument("average_gain_generic: probability vector does not match rows");
    }
    if ((p.array() < 0.0).any() || std::abs(p.sum() - 1.0) > 1e-9) {
        throw std::invalid_argument("average_gain_generic: p is not a probability vector");
    }
    CMatrix P = CMatrix::Zero(n, n);
    for (Index z = 0; z < m; ++z) {
        const double nrm2 = A.row(z).squaredNorm();
        if (nrm2 == 0.0) {
            if (p(z) > 0.0) {
                throw std::domain_error("average_gain_generic: zero row with nonzero probability");
            }
            continue;
        }
        const CVector a = A.row(z).adjoint();
        P.noalias() += (p(z) / nrm2) * (a * a.adjoint());
    }
    // Orthonormal basis of the row space of A, i.e. the column space of A^H.
    Eigen::JacobiSVD<CMatrix> svd(A.adjoint(), Eigen::ComputeThinU);
    const RVector& sv = svd.singularValues();
    const double tol = (sv.size() ? sv(0) : 0.0) * static_cast<double>(std::max(m, n)) *
                       std::numeric_limits<double>::epsilon();
    Index rank = 0;
    while (rank < sv.size() && sv(rank) > tol) {
        ++rank;
    }
    if (rank == 0) {
        throw std::domain_error("average_gain_generic: zero matrix");
    }
    const CMatrix Q = svd.matrixU().leftCols(rank);
    const CMatrix restricted = Q.adjoint() * P * Q;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(restricted, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
}

/// Closed form and generic definition side by side for one channel estimate.
inline GainReport average_gain(const CMatrix& Ghat, double xi)
{
    GainReport g = average_gain_closed(Ghat, xi);
    const CMatrix A = kaczmarz_system(Ghat, xi);
    g.kappa_generic = average_gain_generic(A, energy_probabilities(A));
    return g;
}

/// Upper bound 1/K and the i.i.d. lower bound (1 - sqrt(K/M))^2 / K.
inline GainReport gain_bounds(Index M, Index K, double /*xi*/ = 0.0)
{
    if (K < 1 || K > M) {
        throw std::invalid_argument("gain_bounds: need 1 <= K <= M");
    }
    GainReport g;
    g.kappa_upper = 1.0 / static_cast<double>(K);
    const double root = 1.0 - std::sqrt(static_cast<double>(K) / static_cast<double>(M));
    g.iid_lower = root * root / static_cast<double>(K);
    return g;
}

// ---------------------------------------------------------------------------
// Convergence metrics
// ---------------------------------------------------------------------------

struct BoundCheck {
    bool pass = true;
    double margin = std::numeric_limits<double>::infinity(); // min over t of bound / observed
    Index worst_t = -1;
};

/// Compare a seed-averaged squared-gap trace with the expected-rate bound
///     E||c^t - c*||^2 <= (1 - kappa)^(t - start) ||c^start - c*||^2.
/// `mean_sq_gap[t]` is the mean squared gap after t iterations; entries before
/// `start` are ignored. Passes when observed <= slack * bound everywhere.
inline BoundCheck convergence_bound_check(const std::vector<double>& mean_sq_gap, double kappa,
                                          double initial_sq_gap, Index start = 0, double slack = 2.0)
{
    if (!(kappa > 0.0 && kappa <= 1.0)) {
        throw std::invalid_argument("convergence_bound_check: kappa must lie in (0, 1]");
    }
    BoundCheck out;
    for (Index t = start; t < static_cast<Index>(mean_sq_gap.size()); ++t) {
        const double observed = mean_sq_gap[static_cast<std::size_t>(t)];
        const double bound = std::pow(1.0 - kappa, static_cast<double>(t - start)) * initial_sq_gap;
        if (observed <= 0.0) {
            continue;
        }
        const double ratio = bound / observed;
        if (ratio < out.margin) {
            out.margin = ratio;
            out.worst_t = t;
        }
        if (observed > slack * bound) {
            out.pass = false;
        }
    }
    return out;
}

/// 100 (SE_canonical - SE_rka) / SE_canonical.
inline double gap_percentage(double se_rka, double se_canonical)
{
    if (!(se_canonical > 0.0)) {
        throw std::domain_error("gap_percentage: canonical SE must be positive");
    }
    return 100.0 * (se_canonical - se_rka) / se_canonical;
}

struct GapCrossing {
    bool reached = false;
    double t_bar = std::numeric_limits<double>::quiet_NaN();
    double last_gap = std::numeric_limits<double>::quiet_NaN();
};

/// First crossing of the gap curve below `tolerance_percent`, linearly
/// interpolated between neighbouring grid points.
inline GapCrossing interpolate_crossing(const std::vector<double>& grid, const std::vector<double>& gaps,
                                        double tolerance_percent)
{
    if (grid.empty() || grid.size() != gaps.size()) {
        throw std::invalid_argument("iterations_to_gap: grid and gap curve must be non-empty and aligned");
    }
    if (!std::is_sorted(grid.begin(), grid.end()) ||
        std::adjacent_find(grid.begin(), grid.end()) != grid.end()) {
        throw std::invalid_argument("iterations_to_gap: grid must be strictly increasing");
    }
    if (!(tolerance_percent > 0.0 && tolerance_percent <= 100.0)) {
        throw std::invalid_argument("iterations_to_gap: tolerance must lie in (0, 100]");
    }
    GapCrossing out;
    out.last_gap = gaps.back();
    if (gaps.front() <= tolerance_percent) {
        out.reached = true;
        out.t_bar = grid.front();
        return out;
    }
    for (std::size_t j = 1; j < grid.size(); ++j) {
        if (gaps[j] <= tolerance_percent) {
            const double frac = (gaps[j - 1] - tolerance_percent) / (gaps[j - 1] - gaps[j]);
            out.reached = true;
            out.t_bar = grid[j - 1] + frac * (grid[j] - grid[j - 1]);
            return out;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Drop-averaged Monte Carlo sweeps
// ---------------------------------------------------------------------------

struct MonteCarloPlan {
    Index n_drops = 50;
    Index n_realizations = 200;
    std::uint64_t seed = 0;
    std::size_t threads = 1;
};

/// One drop: UE placement and covariance matrices, from streams keyed by the
/// drop index alone so every experiment sees the same geometry for a seed.
inline CovarianceSet make_drop(const SystemConfig& sys, Correlation corr, std::uint64_t seed, Index drop)
{
    const auto d = static_cast<std::uint64_t>(drop);
    Rng place = Rng::derive(seed, {stream::drop, d});
    Rng shadow = Rng::derive(seed, {stream::shadowing, d});
    const UserDrop users = drop_users(sys, place);
    return draw_covariances(sys, corr, users, shadow);
}

/// Average SE per UE versus the Kaczmarz iteration budget, with the
/// canonical RZF combiner as reference.
struct SeSweep {
    std::vector<Index> grid;
    RVector se_mean;    // per grid point: mean over drops of the per-UE average SE
    RVector se_stderr;  // standard error across drops
    double rzf_mean = 0.0;
    double rzf_stderr = 0.0;
    std::vector<RVector> per_drop; // per drop: SE per grid point
    RVector rzf_per_drop;

    std::vector<double> gap_percent() const
    {
        std::vector<double> out;
        out.reserve(grid.size());
        for (Index j = 0; j < se_mean.size(); ++j) {
            out.push_back(gap_percentage(se_mean(j), rzf_mean));
        }
        return out;
    }
};

namespace detail {

inline std::pair<double, double> mean_stderr(const RVector& x)
{
    const auto n = static_cast<double>(x.size());
    const double m = x.mean();
    if (x.size() < 2) {
        return {m, std::numeric_limits<double>::quiet_NaN()};
    }
    const double var = (x.array() - m).square().sum() / (n - 1.0);
    return {m, std::sqrt(var / n)};
}

} // namespace detail

/// Runs the Kaczmarz combiner for every grid budget on shared channel
/// realizations (one long run per realization, captured at each budget) and
/// evaluates the SE per drop. Grid entries must be ascending; 0 denotes the
/// all-zero starting point of the solver.
inline SeSweep se_versus_iterations(const Scenario& scenario, const std::vector<Index>& grid,
                                    const RkaOptions& rka, const MonteCarloPlan& plan)
{
    const SystemConfig& sys = scenario.system;
    sys.validate();
    if (grid.empty()) {
        throw std::invalid_argument("se_versus_iterations: empty iteration grid");
    }
    if (plan.n_drops < 1 || plan.n_realizations < 1) {
        throw std::invalid_argument("se_versus_iterations: need at least one drop and one realization");
    }
    const Index T = std::max<Index>(1, grid.back());
    RkaOptions opts = rka;
    opts.iterations = T;
    opts.xi = sys.regularization();

    const auto nd = static_cast<std::size_t>(plan.n_drops);
    std::vector<RVector> per_drop(nd);
    std::vector<double> rzf(nd);
    parallel_for(nd, plan.threads, [&](std::size_t di) {
        const auto d = static_cast<std::uint64_t>(di);
        const CovarianceSet cov = make_drop(sys, scenario.correlation, plan.seed, static_cast<Index>(di));
        const ChannelSampler sampler(cov);
        const ChannelEstimator estimator(scenario.estimator, cov, sys);
        std::vector<SeAccumulator> acc(grid.size(), SeAccumulator(sys.K));
        SeAccumulator acc_rzf(sys.K);
        for (Index t = 0; t < plan.n_realizations; ++t) {
            const auto tt = static_cast<std::uint64_t>(t);
            Rng ch = Rng::derive(plan.seed, {stream::channel, d, tt});
            Rng noise = Rng::derive(plan.seed, {stream::pilot_noise, d, tt});
            const CMatrix G = sampler.sample(ch);
            const ChannelEstimate est = estimator(G, noise);
            acc_rzf.add(rzf_combiner(est.Ghat, opts.xi).V, G);
            const auto Ds = rka_parl_checkpoints(est.Ghat, opts, grid,
                                                 derive_seed(plan.seed, {stream::rka_rows, d, tt}));
            for (std::size_t j = 0; j < grid.size(); ++j) {
                acc[j].add(est.Ghat * Ds[j], G);
            }
        }
        RVector se(static_cast<Index>(grid.size()));
        for (std::size_t j = 0; j < grid.size(); ++j) {
            se(static_cast<Index>(j)) = acc[j].finish(sys.rho_ul(), sys.tau_ul(), sys.tau_c).mean_se();
        }
        per_drop[di] = std::move(se);
        rzf[di] = acc_rzf.finish(sys.rho_ul(), sys.tau_ul(), sys.tau_c).mean_se();
    });

    SeSweep out;
    out.grid = grid;
    out.se_mean.resize(static_cast<Index>(grid.size()));
    out.se_stderr.resize(static_cast<Index>(grid.size()));
    for (std::size_t j = 0; j < grid.size(); ++j) {
        RVector col(plan.n_drops);
        for (std::size_t di = 0; di < nd; ++di) {
            col(static_cast<Index>(di)) = per_drop[di](static_cast<Index>(j));
        }
        const auto [m, s] = detail::mean_stderr(col);
        out.se_mean(static_cast<Index>(j)) = m;
        out.se_stderr(static_cast<Index>(j)) = s;
    }
    out.rzf_per_drop = Eigen::Map<const RVector>(rzf.data(), plan.n_drops);
    std::tie(out.rzf_mean, out.rzf_stderr) = detail::mean_stderr(out.rzf_per_drop);
    out.per_drop = std::move(per_drop);
    return out;
}

/// Average iteration count needed for the Kaczmarz combiner to come within
/// `tolerance_percent` of the canonical RZF SE.
inline GapCrossing iterations_to_gap(const Scenario& scenario, double tolerance_percent,
                                     const std::vector<Index>& grid, const MonteCarloPlan& plan,
                                     const RkaOptions& rka = {})
{
    const SeSweep sweep = se_versus_iterations(scenario, grid, rka, plan);
    std::vector<double> g(grid.begin(), grid.end());
    return interpolate_crossing(g, sweep.gap_percent(), tolerance_percent);
}

/// Empirical CDF of the per-UE sample probability averaged over small-scale
/// realizations, pooled across drops. Returns sorted (value, fraction) pairs.
inline std::vector<std::pair<double, double>> sample_prob_cdf(const Scenario& scenario, const MonteCarloPlan& plan)
{
    const SystemConfig& sys = scenario.system;
    sys.validate();
    if (plan.n_drops < 1 || plan.n_realizations < 1) {
        throw std::invalid_argument("sample_prob_cdf: need at least one drop and one realization");
    }
    const double xi = sys.regularization();
    const auto nd = static_cast<std::size_t>(plan.n_drops);
    std::vector<RVector> avg(nd);
    parallel_for(nd, plan.threads, [&](std::size_t di) {
        const auto d = static_cast<std::uint64_t>(di);
        const CovarianceSet cov = make_drop(sys, scenario.correlation, plan.seed, static_cast<Index>(di));
        const ChannelSampler sampler(cov);
        const ChannelEstimator estimator(scenario.estimator, cov, sys);
        RVector sum = RVector::Zero(sys.K);
        for (Index t = 0; t < plan.n_realizations; ++t) {
            const auto tt = static_cast<std::uint64_t>(t);
            Rng ch = Rng::derive(plan.seed, {stream::channel, d, tt});
            Rng noise = Rng::derive(plan.seed, {stream::pilot_noise, d, tt});
            const CMatrix G = sampler.sample(ch);
            sum += sample_probabilities(estimator(G, noise).Ghat, xi);
        }
        avg[di] = sum / static_cast<double>(plan.n_realizations);
    });
    std::vector<double> pooled;
    pooled.reserve(nd * static_cast<std::size_t>(sys.K));
    for (const auto& a : avg) {
        pooled.insert(pooled.end(), a.data(), a.data() + a.size());
    }
    std::sort(pooled.begin(), pooled.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(pooled.size());
    const auto n = static_cast<double>(pooled.size());
    for (std::size_t i = 0; i < pooled.size(); ++i) {
        cdf.emplace_back(pooled[i], static_cast<double>(i + 1) / n);
    }
    return cdf;
}

/// Median of an empirical CDF table.
inline double cdf_median(const std::vector<std::pair<double, double>>& cdf)
{
    if (cdf.empty()) {
        throw std::invalid_argument("cdf_median: empty table");
    }
    const std::size_t n = cdf.size();
    if (n % 2 == 1) {
        return cdf[n / 2].first;
    }
    return 0.5 * (cdf[n / 2 - 1].first + cdf[n / 2].first);
}

} // namespace rkamimo

#endif
