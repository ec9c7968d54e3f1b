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


#ifndef RKAMIMO_HARNESS_CHECKS_HPP
#define RKAMIMO_HARNESS_CHECKS_HPP

// Acceptance checks shared by the acceptance binary and `rkamimo validate`.
// Each returns a pass flag plus a one-line measurement summary.

#include "../analysis.hpp"
#include "../complexity.hpp"
#include "experiments.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

namespace rkamimo::harness {

enum class Scale { Full, Quick };

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

namespace detail {

inline std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0, double e = 0, double g = 0)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d, e, g);
    return buf;
}

inline CMatrix iid(Index M, Index K, std::uint64_t seed)
{
    Rng rng(seed);
    return rng.cnormal_matrix(M, K);
}

inline CMatrix heterogeneous(Index M, Index K, std::uint64_t seed, double spread_db)
{
    Rng rng(seed);
    CMatrix G = rng.cnormal_matrix(M, K);
    for (Index k = 0; k < K; ++k) G.col(k) *= std::sqrt(db_to_linear(-spread_db * rng.uniform()));
    return G;
}

inline double rel(const CMatrix& a, const CMatrix& b) { return (a - b).norm() / b.norm(); }

inline RkaOptions opts(Index T, double xi, RkaInit init = RkaInit::Hybrid,
                       RkaSchedule sched = RkaSchedule::Randomized)
{
    RkaOptions o;
    o.iterations = T;
    o.xi = xi;
    o.init = init;
    o.schedule = sched;
    return o;
}

template <class F>
CheckResult timed(const std::string& name, F&& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    CheckResult r{name, false, "", 0.0};
    try {
        body(r);
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = std::string("exception: ") + e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

} // namespace detail

/// u^t = Ghat z^t at every iteration, both starts, both schedules.
inline CheckResult check_state_identity(Scale scale = Scale::Full)
{
    return detail::timed("state identity u = G z", [&](CheckResult& r) {
        const int n = scale == Scale::Full ? 100 : 20;
        double worst = 0.0;
        for (int s = 0; s < n; ++s) {
            Rng pick(static_cast<std::uint64_t>(s));
            const Index M = 2 + static_cast<Index>(pick.uniform() * 31);
            const Index K = 1 + static_cast<Index>(pick.uniform() * static_cast<double>(std::min<Index>(8, M)));
            const double xi = pick.uniform(0.0, 1.0);
            const CMatrix G = detail::heterogeneous(M, K, 10000 + s, 20.0);
            for (RkaInit init : {RkaInit::Hybrid, RkaInit::Plain}) {
                for (RkaSchedule sch : {RkaSchedule::Randomized, RkaSchedule::Cyclic}) {
                    rka_parl(G, detail::opts(100, xi, init, sch), static_cast<std::uint64_t>(s),
                             [&](const RkaStep& st) {
                                 const double nu = std::max(st.u.norm(), 1e-300);
                                 worst = std::max(worst, (st.u - G * st.z).norm() / nu);
                             });
                }
            }
        }
        r.pass = worst <= 1e-10;
        r.detail = detail::fmt("%g instances, worst relative mismatch %.3g (limit 1e-10)", n, worst);
    });
}

/// Kaczmarz combiner converges to the closed-form RZF combiner.
inline CheckResult check_oracle_convergence(Scale scale = Scale::Full)
{
    return detail::timed("oracle convergence to RZF", [&](CheckResult& r) {
        const int seeds = scale == Scale::Full ? 20 : 5;
        double worst = 0.0;
        for (int s = 0; s < seeds; ++s) {
            const CMatrix G = detail::iid(8, 2, 20000 + s);
            const Combiner c = rka_parl(G, detail::opts(10000, 1.0), static_cast<std::uint64_t>(s));
            worst = std::max(worst, detail::rel(c.V, rzf_combiner(G, 1.0).V));
        }
        r.pass = worst <= 1e-6;
        r.detail = detail::fmt("M=8 K=2 xi=1 T=1e4, %g seeds, worst relative error %.3g (limit 1e-6)", seeds, worst);
    });
}

/// ZF inverts the channel and RZF with a vanishing xi approaches ZF.
inline CheckResult check_zf_identity(Scale scale = Scale::Full)
{
    return detail::timed("ZF identity and RZF limit", [&](CheckResult& r) {
        const int n = scale == Scale::Full ? 100 : 20;
        double worst_id = 0.0;
        double worst_lim = 0.0;
        bool pass = true;
        for (int s = 0; s < n; ++s) {
            Rng pick(static_cast<std::uint64_t>(30000 + s));
            const Index K = 1 + static_cast<Index>(pick.uniform() * 8);
            const Index M = 2 * K + static_cast<Index>(pick.uniform() * 56);
            const CMatrix G = detail::iid(M, K, 31000 + s);
            const CMatrix V = zf_combiner(G).V;
            const double id = (G.adjoint() * V - CMatrix::Identity(K, K)).norm();
            const double lim = detail::rel(rzf_combiner(G, 1e-10).V, V);
            pass = pass && id <= 1e-8 * static_cast<double>(K) && lim <= 1e-6;
            worst_id = std::max(worst_id, id / static_cast<double>(K));
            worst_lim = std::max(worst_lim, lim);
        }
        r.pass = pass;
        r.detail = detail::fmt("%g instances, worst ||G^H V - I||/K %.3g, worst RZF(1e-10) vs ZF %.3g", n, worst_id,
                               worst_lim);
    });
}

/// Closed-form and projector-based average gains agree; the kappa sandwich
/// holds on the xi grid.
inline CheckResult check_kappa(Scale scale = Scale::Full)
{
    return detail::timed("kappa closed vs generic, gain sandwich", [&](CheckResult& r) {
        const int n = scale == Scale::Full ? 100 : 20;
        double worst = 0.0;
        int sandwich_fail = 0;
        for (int s = 0; s < n; ++s) {
            Rng pick(static_cast<std::uint64_t>(40000 + s));
            const Index K = 1 + static_cast<Index>(pick.uniform() * 8);
            const Index M = K + static_cast<Index>(pick.uniform() * 24);
            const CMatrix G = detail::heterogeneous(M, K, 41000 + s, 20.0);
            for (double xi : {0.0, 0.1, 1.0, 10.0}) {
                const GainReport g = average_gain(G, xi);
                worst = std::max(worst, std::abs(g.kappa_closed - g.kappa_generic));
                const bool ok = g.lower_ratio <= g.kappa_closed + 1e-15 && g.kappa_closed <= g.kappa_upper + 1e-15;
                sandwich_fail += ok ? 0 : 1;
            }
        }
        r.pass = worst <= 1e-8 && sandwich_fail == 0;
        r.detail = detail::fmt("%g instances x 4 xi, worst |closed - generic| %.3g, sandwich violations %g", n, worst,
                               sandwich_fail);
    });
}

/// Seed-averaged squared gap stays under 2 (1 - kappa)^t times the initial one.
inline CheckResult check_corollary_bound(Scale scale = Scale::Full)
{
    return detail::timed("expected-gap convergence bound", [&](CheckResult& r) {
        const int seeds = scale == Scale::Full ? 200 : 50;
        const CMatrix G = detail::iid(8, 2, 50000);
        const double xi = 1.0;
        const double kappa = average_gain_closed(G, xi).kappa_closed;
        const RzfSolution target = rzf_solution(G, xi);
        const Index T = 60;
        bool pass = true;
        double margin = 0.0;
        for (RkaInit init : {RkaInit::Plain, RkaInit::Hybrid}) {
            for (Index k = 0; k < 2; ++k) {
                std::vector<double> mean(static_cast<std::size_t>(T + 1), 0.0);
                for (int s = 0; s < seeds; ++s) {
                    rka_parl(G, detail::opts(T, xi, init), static_cast<std::uint64_t>(s), [&](const RkaStep& st) {
                        if (st.k == k) {
                            mean[static_cast<std::size_t>(st.t + 1)] +=
                                std::pow(state_gap(st.u, st.z, target, k, xi), 2) / seeds;
                        }
                    });
                }
                mean[0] = std::pow(state_norm(target, k, xi), 2);
                const Index start = init == RkaInit::Hybrid ? 1 : 0;
                const BoundCheck c =
                    convergence_bound_check(mean, kappa, mean[static_cast<std::size_t>(start)], start);
                pass = pass && c.pass;
                margin = std::max(margin, c.margin);
            }
        }
        r.pass = pass;
        r.detail = detail::fmt("M=8 K=2 xi=1, %g seeds, kappa %.4f, worst ratio to bound %.3f (limit 1)", seeds,
                               kappa, margin);
    });
}

/// Exact upper bound, cost balance at the bound and trade-off thresholds.
inline CheckResult check_complexity()
{
    return detail::timed("complexity exactness and thresholds", [&](CheckResult& r) {
        const double b = t_upper(200, 100, Scheme::RZF);
        double worst = 0.0;
        Rng rng(60000);
        for (int i = 0; i < 50; ++i) {
            const auto M = static_cast<std::int64_t>(1 + rng.uniform() * 512);
            const auto K = static_cast<std::int64_t>(1 + rng.uniform() * static_cast<double>(M));
            const std::int64_t tau_ul = 190;
            for (Scheme s : {Scheme::ZF, Scheme::RZF}) {
                const ComplexityReport canon = s == Scheme::ZF ? cost_zf(M, K, tau_ul) : cost_rzf(M, K, tau_ul);
                const double rka = static_cast<double>(M) * t_upper(M, K, s) +
                                   static_cast<double>(cost_rka(M, K, 0, tau_ul).ul_total());
                worst = std::max(worst, std::abs(rka - static_cast<double>(canon.ul_total())));
            }
        }
        const auto m10 = tradeoff_threshold(0.1, 95.0, Scheme::RZF);
        const auto m1 = tradeoff_threshold(0.1, 333.0, Scheme::RZF);
        r.pass = b == 6617.0 && worst <= 1.0 && m10 == 139 && m1 == 255;
        r.detail = detail::fmt("t_upper(200,100)=%.6f, worst balance error %.3g counts, thresholds %g / %g", b, worst,
                               static_cast<double>(m10), static_cast<double>(m1));
    });
}

/// Average SNR at the exclusion radius and at the cell edge.
inline CheckResult check_snr_anchors()
{
    return detail::timed("SNR anchors", [&](CheckResult& r) {
        const SystemConfig c;
        const double near = average_snr_db(c, 35.0);
        const double edge = average_snr_db(c, 250.0);
        r.pass = std::abs(near - 17.63) <= 0.01 && std::abs(edge + 14.47) <= 0.01;
        r.detail = detail::fmt("%.4f dB at 35 m (17.63), %.4f dB at 250 m (-14.47)", near, edge);
    });
}

/// Iterations to reach 10% / 1% of the RZF SE at loading 0.1 with LS
/// estimates, and growth of the 10% count with loading at reduced trials.
inline CheckResult check_table3(Scale scale = Scale::Full, std::uint64_t seed = 1, std::size_t threads = 1)
{
    return detail::timed("iteration counts to reach RZF SE", [&](CheckResult& r) {
        ExperimentSpec s;
        s.plan.seed = seed;
        s.plan.threads = threads;
        if (scale == Scale::Quick) {
            s.plan.n_drops = 10;
            s.plan.n_realizations = 20;
        }
        const ResultTable t = run_table3(s);
        bool pass = true;
        std::string detail;
        for (std::size_t i = 0; i < t.size(); ++i) {
            const Correlation c = parse_correlation(t.text(i, "correlation"));
            const double tol = t.number(i, "tolerance_percent");
            const double got = t.number(i, "t_bar");
            const double ref = *reference_target(0.1, c, tol);
            const bool ok = t.number(i, "reached") == 1.0 && std::abs(got - ref) <= 0.2 * ref;
            pass = pass && ok;
            detail += detail::fmt("%.1f", got) + "/" + detail::fmt("%g", ref) + " ";
        }
        // Loading growth: same procedure on a longer grid with fewer trials.
        ExperimentSpec g = s;
        g.plan.n_drops = scale == Scale::Full ? 10 : 4;
        g.plan.n_realizations = 10;
        g.t_grid.clear();
        for (Index T = 0; T <= 1500; T += 100) g.t_grid.push_back(T);
        g.table3_loadings = {0.1, 0.3};
        g.tolerances = {10.0};
        const ResultTable growth = run_table3(g);
        for (Correlation c : s.correlations) {
            double lo = 0.0;
            double hi = 0.0;
            for (std::size_t i = 0; i < growth.size(); ++i) {
                if (growth.text(i, "correlation") != to_string(c)) continue;
                (growth.number(i, "loading") < 0.2 ? lo : hi) = growth.number(i, "t_bar");
            }
            pass = pass && hi > lo;
            detail += "| " + to_string(c) + " T(10%) " + detail::fmt("%.1f -> %.1f", lo, hi) + " ";
        }
        r.pass = pass;
        r.detail = detail::fmt("LS, %g drops x %g realizations: T(10%), T(1%) measured/ref uncorrelated then correlated: ",
                               static_cast<double>(s.plan.n_drops), static_cast<double>(s.plan.n_realizations)) +
                   detail;
    });
}

/// Hybrid start is never worse than the plain start on average, and it alone
/// recovers a UE whose row has zero sampling probability.
inline CheckResult check_hybrid(Scale scale = Scale::Full, std::uint64_t seed = 1, std::size_t threads = 1)
{
    return detail::timed("hybrid initialization superiority", [&](CheckResult& r) {
        ExperimentSpec s;
        s.plan.seed = seed;
        s.plan.threads = threads;
        s.plan.n_drops = scale == Scale::Full ? 100 : 20;
        s.plan.n_realizations = scale == Scale::Full ? 20 : 5;
        const Scenario sc{s.system, Estimator::LS, Correlation::Correlated};
        const SeSweep h = se_versus_iterations(sc, s.fig2_t_grid, detail::rka_options(s, RkaInit::Hybrid), s.plan);
        const SeSweep p = se_versus_iterations(sc, s.fig2_t_grid, detail::rka_options(s, RkaInit::Plain), s.plan);
        double worst = std::numeric_limits<double>::infinity();
        bool se_ok = true;
        for (Index j = 0; j < h.se_mean.size(); ++j) {
            const double d = h.se_mean(j) - p.se_mean(j);
            se_ok = se_ok && d >= 0.0;
            if (h.grid[static_cast<std::size_t>(j)] > 0) worst = std::min(worst, d); // T = 0 ties trivially
        }

        // Zero-power UE with a degenerate row distribution.
        CMatrix G = detail::iid(16, 4, 70000);
        G.col(3).setZero();
        const double xi = 0.1;
        const RzfSolution target = rzf_solution(G, xi);
        bool plain_zero = true;
        double hybrid_err = 0.0;
        for (std::uint64_t q = 0; q < 20; ++q) {
            RkaOptions o = detail::opts(500, xi, RkaInit::Plain);
            o.probabilities = RVector::Zero(4);
            (*o.probabilities) << 0.25, 0.25, 0.5, 0.0;
            plain_zero = plain_zero && rka_parl(G, o, q).D->col(3).isZero(0.0);
            o.init = RkaInit::Hybrid;
            const CMatrix D = *rka_parl(G, o, q).D;
            hybrid_err = std::max(hybrid_err, (D.col(3) - target.D.col(3)).norm() / target.D.col(3).norm());
        }
        r.pass = se_ok && plain_zero && hybrid_err <= 1e-12;
        r.detail = detail::fmt("%g drops: min over T > 0 of SE(hybrid) - SE(plain) = %.3g; zero-probability UE: plain "
                               "column zero = %g, hybrid relative error %.3g",
                               static_cast<double>(s.plan.n_drops), worst, plain_zero ? 1.0 : 0.0, hybrid_err);
    });
}

/// MMSE never loses to LS by more than 0.01 NMSE; LS matches 1/(tau_p rho beta).
inline CheckResult check_estimators(Scale scale = Scale::Full, std::uint64_t seed = 1)
{
    return detail::timed("estimator ordering and LS closed form", [&](CheckResult& r) {
        const int trials = scale == Scale::Full ? 300 : 60;
        double worst_order = -std::numeric_limits<double>::infinity();
        double worst_ls = 0.0;
        for (Correlation corr : {Correlation::Uncorrelated, Correlation::Correlated}) {
            for (double alpha : {2.0, 3.76, 4.0}) {
                SystemConfig cfg;
                cfg.alpha = alpha;
                const CovarianceSet cov = make_drop(cfg, corr, seed, 0);
                const ChannelSampler sampler(cov);
                const MmseFilter mmse(cov, cfg);
                RVector ls = RVector::Zero(cfg.K);
                RVector mm = RVector::Zero(cfg.K);
                for (int t = 0; t < trials; ++t) {
                    Rng ch = Rng::derive(seed, {stream::channel, std::uint64_t(t)});
                    Rng no = Rng::derive(seed, {stream::pilot_noise, std::uint64_t(t)});
                    const CMatrix G = sampler.sample(ch);
                    const PilotObservation obs = observe_pilots(G, cfg, no);
                    ls += nmse(ls_estimate(obs), G, cov) / trials;
                    mm += nmse(mmse.apply(obs), G, cov) / trials;
                }
                const double tp_rho = static_cast<double>(cfg.pilot_length()) * cfg.rho_ul();
                for (Index k = 0; k < cfg.K; ++k) {
                    const double beta = cov.R[static_cast<std::size_t>(k)].trace().real() / static_cast<double>(cfg.M);
                    const double closed = 1.0 / (tp_rho * beta);
                    worst_ls = std::max(worst_ls, std::abs(ls(k) - closed) / closed);
                    worst_order = std::max(worst_order, mm(k) - ls(k));
                }
            }
        }
        r.pass = worst_order <= 0.01 && worst_ls <= 0.05;
        r.detail = detail::fmt("6 scenarios, %g trials: max NMSE_MMSE - NMSE_LS %.3g (limit 0.01), worst LS "
                               "closed-form deviation %.2f%% (limit 5%%)",
                               trials, worst_order, 100.0 * worst_ls);
    });
}

/// Median sample probability drops when the pathloss exponent grows.
inline CheckResult check_fig1_ordering(Scale scale = Scale::Full, std::uint64_t seed = 1)
{
    return detail::timed("sample-probability ordering over alpha", [&](CheckResult& r) {
        MonteCarloPlan plan;
        plan.seed = seed;
        plan.n_drops = 50;
        plan.n_realizations = scale == Scale::Full ? 20 : 4;
        bool pass = true;
        std::string detail;
        for (Estimator e : {Estimator::True, Estimator::LS, Estimator::MMSE}) {
            Scenario sc{SystemConfig{}, e, Correlation::Uncorrelated};
            sc.system.alpha = 2.0;
            const double m2 = cdf_median(sample_prob_cdf(sc, plan));
            sc.system.alpha = 4.0;
            const double m4 = cdf_median(sample_prob_cdf(sc, plan));
            pass = pass && m4 <= m2;
            detail += to_string(e) + detail::fmt(" %.4g<=%.4g ", m4, m2);
        }
        r.pass = pass;
        r.detail = "50 drops, median at alpha=4 vs alpha=2: " + detail;
    });
}

/// All acceptance checks in criterion order.
inline std::vector<CheckResult> run_all_checks(Scale scale, std::uint64_t seed = 1, std::size_t threads = 1,
                                               const std::function<void(const CheckResult&)>& on_result = {})
{
    std::vector<std::function<CheckResult()>> checks{
        [&] { return check_state_identity(scale); },
        [&] { return check_oracle_convergence(scale); },
        [&] { return check_zf_identity(scale); },
        [&] { return check_kappa(scale); },
        [&] { return check_corollary_bound(scale); },
        [&] { return check_complexity(); },
        [&] { return check_snr_anchors(); },
        [&] { return check_table3(scale, seed, threads); },
        [&] { return check_hybrid(scale, seed, threads); },
        [&] { return check_estimators(scale, seed); },
        [&] { return check_fig1_ordering(scale, seed); },
    };
    std::vector<CheckResult> out;
    for (auto& c : checks) {
        out.push_back(c());
        if (on_result) on_result(out.back());
    }
    return out;
}

} // namespace rkamimo::harness

#endif
