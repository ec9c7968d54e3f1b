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


#ifndef RKAMIMO_HARNESS_EXPERIMENTS_HPP
#define RKAMIMO_HARNESS_EXPERIMENTS_HPP

#include "../analysis.hpp"
#include "../complexity.hpp"
#include "../config.hpp"
#include "table.hpp"

#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace rkamimo::harness {

/// Everything one harness invocation needs: the base scenario, sweep grids,
/// Monte Carlo sizes and the master seed. Built from a key = value config with
/// the reference-scenario defaults preset.
struct ExperimentSpec {
    SystemConfig system;
    std::vector<Estimator> estimators{Estimator::True, Estimator::LS, Estimator::MMSE};
    std::vector<Correlation> correlations{Correlation::Uncorrelated, Correlation::Correlated};
    std::vector<double> alphas{2.0, 4.0};
    std::vector<Index> t_grid{0, 100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
    std::vector<Index> fig2_t_grid{0, 10, 20, 30, 50, 75, 100, 150, 200, 300, 400, 500};
    Correlation fig2_correlation = Correlation::Correlated;
    std::vector<double> loadings{0.1, 0.3};
    std::vector<double> table3_loadings{0.1};
    std::vector<double> tolerances{10.0, 1.0};
    std::vector<double> r_grid{0.0, 0.3, 0.5, 0.7, 0.9};
    std::vector<double> sigma_grid{0.0, 2.0, 4.0, 6.0, 8.0};
    Estimator fig4_estimator = Estimator::LS;
    std::vector<double> fig5_loadings{0.1, 0.3, 0.5};
    std::int64_t fig5_m_min = 10;
    std::int64_t fig5_m_max = 500;
    LoadingRule loading_rule = LoadingRule::Continuous;
    bool shared_rows = false;
    MonteCarloPlan plan;
    std::function<void(const std::string&)> log; // optional progress sink

    void validate() const
    {
        system.validate();
        auto nonempty = [](bool empty, const char* what) {
            if (empty) throw invalid_config(std::string("experiment: ") + what + " grid is empty");
        };
        nonempty(estimators.empty(), "estimator");
        nonempty(correlations.empty(), "correlation");
        nonempty(alphas.empty(), "alpha");
        nonempty(t_grid.empty(), "T");
        nonempty(fig2_t_grid.empty(), "fig2 T");
        nonempty(loadings.empty(), "loading");
        nonempty(table3_loadings.empty(), "table3 loading");
        nonempty(tolerances.empty(), "tolerance");
        nonempty(r_grid.empty(), "r");
        nonempty(sigma_grid.empty(), "sigma");
        nonempty(fig5_loadings.empty(), "fig5 loading");
        for (const auto* g : {&t_grid, &fig2_t_grid}) {
            for (std::size_t i = 0; i < g->size(); ++i) {
                if ((*g)[i] < 0 || (i > 0 && (*g)[i] <= (*g)[i - 1])) {
                    throw invalid_config("experiment: T grids must be nonnegative and strictly increasing");
                }
            }
        }
        for (double l : loadings) check_loading(l);
        for (double l : table3_loadings) check_loading(l);
        for (double l : fig5_loadings) check_loading(l);
        for (double t : tolerances) {
            if (!(t > 0.0 && t <= 100.0)) throw invalid_config("experiment: tolerances must lie in (0, 100]");
        }
        for (double r : r_grid) {
            if (!(r >= 0.0 && r <= 1.0)) throw invalid_config("experiment: r grid must lie in [0, 1]");
        }
        for (double s : sigma_grid) {
            if (!(s >= 0.0)) throw invalid_config("experiment: sigma grid must be >= 0");
        }
        if (fig5_m_min < 1 || fig5_m_max < fig5_m_min) {
            throw invalid_config("experiment: need 1 <= fig5_M_min <= fig5_M_max");
        }
        if (plan.n_drops < 1 || plan.n_realizations < 1 || plan.threads < 1) {
            throw invalid_config("experiment: drops, realizations and threads must be >= 1");
        }
    }

    /// Scenario at a loading factor: M fixed, K = round(loading M).
    SystemConfig at_loading(double loading) const
    {
        SystemConfig s = system;
        s.K = std::max<Index>(1, static_cast<Index>(std::llround(loading * static_cast<double>(system.M))));
        s.validate();
        return s;
    }

    /// Resolved configuration as sorted key = value text (digest input).
    std::string canonical() const;

private:
    static void check_loading(double l)
    {
        if (!(l > 0.0 && l <= 1.0)) throw invalid_config("experiment: loading factors must lie in (0, 1]");
    }
};

namespace detail {

template <class T>
std::string join(const std::vector<T>& v)
{
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_same_v<T, double>) {
            out += format_cell(v[i]);
        } else if constexpr (std::is_arithmetic_v<T>) {
            out += std::to_string(v[i]);
        } else {
            out += to_string(v[i]);
        }
    }
    return out;
}

inline std::vector<Index> to_index_grid(const std::vector<double>& v, const char* key)
{
    std::vector<Index> out;
    for (double x : v) {
        if (x != std::floor(x)) {
            throw invalid_config(std::string("config key '") + key + "': iteration counts must be integers");
        }
        out.push_back(static_cast<Index>(x));
    }
    return out;
}

inline const std::set<std::string>& known_keys()
{
    static const std::set<std::string> keys{
        "system.M", "system.K", "system.cell_side", "system.min_distance", "system.gamma_db", "system.alpha",
        "system.sigma_sf_db", "system.r_corr", "system.ul_power_dbm", "system.noise_power_dbm",
        "system.bandwidth_hz", "system.tau_c", "system.tau_p", "system.xi",
        "experiment.seed", "experiment.drops", "experiment.realizations", "experiment.threads",
        "experiment.estimators", "experiment.correlations", "experiment.alphas", "experiment.T_grid",
        "experiment.fig2_T_grid", "experiment.fig2_correlation", "experiment.loadings",
        "experiment.table3_loadings", "experiment.tolerances", "experiment.r_grid", "experiment.sigma_grid",
        "experiment.fig4_estimator", "experiment.fig5_loadings", "experiment.fig5_M_min",
        "experiment.fig5_M_max", "experiment.loading_rule", "rka.shared_rows"};
    return keys;
}

} // namespace detail

inline std::string ExperimentSpec::canonical() const
{
    KeyValueConfig kv;
    auto num = [](double v) { return format_cell(v); };
    kv.set("system.M", std::to_string(system.M));
    kv.set("system.K", std::to_string(system.K));
    kv.set("system.cell_side", num(system.cell_side));
    kv.set("system.min_distance", num(system.min_distance));
    kv.set("system.gamma_db", num(system.gamma_db));
    kv.set("system.alpha", num(system.alpha));
    kv.set("system.sigma_sf_db", num(system.sigma_sf_db));
    kv.set("system.r_corr", num(system.r_corr));
    kv.set("system.ul_power_dbm", num(system.ul_power_dbm));
    kv.set("system.noise_power_dbm", format_cell(system.noise_power_dbm));
    kv.set("system.bandwidth_hz", num(system.bandwidth_hz));
    kv.set("system.tau_c", std::to_string(system.tau_c));
    if (system.tau_p) kv.set("system.tau_p", std::to_string(*system.tau_p));
    if (system.xi) kv.set("system.xi", num(*system.xi));
    kv.set("experiment.seed", std::to_string(plan.seed));
    kv.set("experiment.drops", std::to_string(plan.n_drops));
    kv.set("experiment.realizations", std::to_string(plan.n_realizations));
    kv.set("experiment.estimators", detail::join(estimators));
    kv.set("experiment.correlations", detail::join(correlations));
    kv.set("experiment.alphas", detail::join(alphas));
    kv.set("experiment.T_grid", detail::join(t_grid));
    kv.set("experiment.fig2_T_grid", detail::join(fig2_t_grid));
    kv.set("experiment.fig2_correlation", to_string(fig2_correlation));
    kv.set("experiment.loadings", detail::join(loadings));
    kv.set("experiment.table3_loadings", detail::join(table3_loadings));
    kv.set("experiment.tolerances", detail::join(tolerances));
    kv.set("experiment.r_grid", detail::join(r_grid));
    kv.set("experiment.sigma_grid", detail::join(sigma_grid));
    kv.set("experiment.fig4_estimator", to_string(fig4_estimator));
    kv.set("experiment.fig5_loadings", detail::join(fig5_loadings));
    kv.set("experiment.fig5_M_min", std::to_string(fig5_m_min));
    kv.set("experiment.fig5_M_max", std::to_string(fig5_m_max));
    kv.set("experiment.loading_rule", loading_rule == LoadingRule::Continuous ? "continuous" : "nearest");
    kv.set("rka.shared_rows", shared_rows ? "true" : "false");
    // Worker count is deliberately absent: it never changes the results.
    return kv.canonical();
}

/// Decimal unsigned 64-bit seed; signs, blanks and trailing text are rejected.
inline std::uint64_t parse_seed(const std::string& text, const std::string& what)
{
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
        throw invalid_config(what + ": not an unsigned 64-bit integer");
    }
    return v;
}

/// Resolve an ExperimentSpec from config text plus command-line overrides. A seed must
/// come from `seed_override` or the `experiment.seed` key.
inline ExperimentSpec spec_from_config(const KeyValueConfig& kv, std::optional<std::uint64_t> seed_override = {})
{
    for (const auto& [key, value] : kv.values()) {
        if (!detail::known_keys().count(key)) {
            throw invalid_config("unknown config key '" + key + "'");
        }
    }
    ExperimentSpec s;
    kv.apply(s.system);
    if (seed_override) {
        s.plan.seed = *seed_override;
    } else if (auto v = kv.get("experiment.seed")) {
        s.plan.seed = parse_seed(*v, "config key 'experiment.seed'");
    } else {
        throw invalid_config("a seed is mandatory (use --seed, RKAMIMO_SEED or experiment.seed)");
    }
    if (auto v = kv.get_int("experiment.drops")) s.plan.n_drops = static_cast<Index>(*v);
    if (auto v = kv.get_int("experiment.realizations")) s.plan.n_realizations = static_cast<Index>(*v);
    if (auto v = kv.get_int("experiment.threads")) {
        if (*v < 1) throw invalid_config("experiment.threads must be >= 1");
        s.plan.threads = static_cast<std::size_t>(*v);
    }
    if (auto w = kv.get_words("experiment.estimators")) {
        s.estimators.clear();
        for (const auto& x : *w) s.estimators.push_back(parse_estimator(x));
    }
    if (auto w = kv.get_words("experiment.correlations")) {
        s.correlations.clear();
        for (const auto& x : *w) s.correlations.push_back(parse_correlation(x));
    }
    if (auto v = kv.get_list("experiment.alphas")) s.alphas = *v;
    if (auto v = kv.get_list("experiment.T_grid")) s.t_grid = detail::to_index_grid(*v, "experiment.T_grid");
    if (auto v = kv.get_list("experiment.fig2_T_grid")) {
        s.fig2_t_grid = detail::to_index_grid(*v, "experiment.fig2_T_grid");
    }
    if (auto v = kv.get("experiment.fig2_correlation")) s.fig2_correlation = parse_correlation(*v);
    if (auto v = kv.get_list("experiment.loadings")) s.loadings = *v;
    if (auto v = kv.get_list("experiment.table3_loadings")) s.table3_loadings = *v;
    if (auto v = kv.get_list("experiment.tolerances")) s.tolerances = *v;
    if (auto v = kv.get_list("experiment.r_grid")) s.r_grid = *v;
    if (auto v = kv.get_list("experiment.sigma_grid")) s.sigma_grid = *v;
    if (auto v = kv.get("experiment.fig4_estimator")) s.fig4_estimator = parse_estimator(*v);
    if (auto v = kv.get_list("experiment.fig5_loadings")) s.fig5_loadings = *v;
    if (auto v = kv.get_int("experiment.fig5_M_min")) s.fig5_m_min = *v;
    if (auto v = kv.get_int("experiment.fig5_M_max")) s.fig5_m_max = *v;
    if (auto v = kv.get("experiment.loading_rule")) {
        if (*v == "continuous") s.loading_rule = LoadingRule::Continuous;
        else if (*v == "nearest") s.loading_rule = LoadingRule::Nearest;
        else throw invalid_config("experiment.loading_rule must be 'continuous' or 'nearest'");
    }
    if (auto v = kv.get("rka.shared_rows")) {
        if (*v == "true") s.shared_rows = true;
        else if (*v == "false") s.shared_rows = false;
        else throw invalid_config("rka.shared_rows must be 'true' or 'false'");
    }
    s.validate();
    return s;
}

inline Metadata metadata_for(const ExperimentSpec& s, const std::string& command)
{
    Metadata m;
    m.seed = s.plan.seed;
    m.command = command;
    m.config = s.canonical();
    return m;
}

namespace detail {

inline void note(const ExperimentSpec& s, const std::string& msg)
{
    if (s.log) s.log(msg);
}

inline RkaOptions rka_options(const ExperimentSpec& s, RkaInit init)
{
    RkaOptions o;
    o.init = init;
    o.shared_rows = s.shared_rows;
    return o;
}

} // namespace detail

// ---------------------------------------------------------------------------

/// Sample-probability CDFs per (alpha, estimator, correlation).
inline ResultTable run_fig1(const ExperimentSpec& s)
{
    s.validate();
    ResultTable t(schema::fig1, metadata_for(s, "fig1"));
    for (double alpha : s.alphas) {
        for (Estimator e : s.estimators) {
            for (Correlation c : s.correlations) {
                Scenario sc{s.system, e, c};
                sc.system.alpha = alpha;
                detail::note(s, "fig1: alpha=" + format_cell(alpha) + " " + to_string(e) + " " + to_string(c));
                for (const auto& [value, frac] : sample_prob_cdf(sc, s.plan)) {
                    t.add({alpha, to_string(e), to_string(c), value, frac});
                }
            }
        }
    }
    return t;
}

struct Fig2Result {
    ResultTable hybrid;
    ResultTable plain;
};

/// Average SE per UE versus the iteration budget, hybrid and plain starts,
/// with the canonical RZF value repeated as the reference column.
inline Fig2Result run_fig2(const ExperimentSpec& s)
{
    s.validate();
    Fig2Result r{ResultTable(schema::fig2, metadata_for(s, "fig2")),
                 ResultTable(schema::fig2, metadata_for(s, "fig2:plain"))};
    for (Estimator e : s.estimators) {
        const Scenario sc{s.system, e, s.fig2_correlation};
        for (RkaInit init : {RkaInit::Hybrid, RkaInit::Plain}) {
            detail::note(s, std::string("fig2: ") + to_string(e) + (init == RkaInit::Hybrid ? " hybrid" : " plain"));
            const SeSweep sw = se_versus_iterations(sc, s.fig2_t_grid, detail::rka_options(s, init), s.plan);
            ResultTable& out = init == RkaInit::Hybrid ? r.hybrid : r.plain;
            for (std::size_t j = 0; j < sw.grid.size(); ++j) {
                out.add({to_string(e), to_string(s.fig2_correlation), static_cast<std::int64_t>(sw.grid[j]),
                         sw.se_mean(static_cast<Index>(j)), sw.se_stderr(static_cast<Index>(j)), sw.rzf_mean});
            }
        }
    }
    return r;
}

/// Gap curve of the hybrid Kaczmarz combiner for one scenario.
inline std::vector<double> gap_curve(const ExperimentSpec& s, const Scenario& sc)
{
    const SeSweep sw = se_versus_iterations(sc, s.t_grid, detail::rka_options(s, RkaInit::Hybrid), s.plan);
    return sw.gap_percent();
}

/// Percentage gap to canonical RZF versus iterations, per loading, estimator
/// and correlation model.
inline ResultTable run_fig3(const ExperimentSpec& s)
{
    s.validate();
    ResultTable t(schema::fig3, metadata_for(s, "fig3"));
    for (double loading : s.loadings) {
        for (Estimator e : s.estimators) {
            for (Correlation c : s.correlations) {
                detail::note(s, "fig3: loading=" + format_cell(loading) + " " + to_string(e) + " " + to_string(c));
                const Scenario sc{s.at_loading(loading), e, c};
                const auto gaps = gap_curve(s, sc);
                for (std::size_t j = 0; j < gaps.size(); ++j) {
                    t.add({loading, to_string(e), to_string(c), static_cast<std::int64_t>(s.t_grid[j]), gaps[j]});
                }
            }
        }
    }
    return t;
}

/// Interpolated iteration counts to reach each tolerance, LS estimates.
inline ResultTable run_table3(const ExperimentSpec& s)
{
    s.validate();
    ResultTable t(schema::table3, metadata_for(s, "table3"));
    const std::vector<double> grid(s.t_grid.begin(), s.t_grid.end());
    for (double loading : s.table3_loadings) {
        for (Correlation c : s.correlations) {
            detail::note(s, "table3: loading=" + format_cell(loading) + " " + to_string(c));
            const auto gaps = gap_curve(s, Scenario{s.at_loading(loading), Estimator::LS, c});
            for (double tol : s.tolerances) {
                const GapCrossing x = interpolate_crossing(grid, gaps, tol);
                t.add({loading, to_string(c), tol, x.t_bar, static_cast<std::int64_t>(x.reached ? 1 : 0),
                       x.last_gap});
            }
        }
    }
    return t;
}

/// Gap curves over antenna correlation (no shadowing) and over shadowing
/// spread (no antenna correlation), correlated-model covariances.
inline ResultTable run_fig4(const ExperimentSpec& s)
{
    s.validate();
    ResultTable t(schema::fig4, metadata_for(s, "fig4"));
    const SystemConfig base = s.at_loading(0.1);
    auto sweep = [&](const std::string& name, double r, double sigma) {
        Scenario sc{base, s.fig4_estimator, Correlation::Correlated};
        sc.system.r_corr = r;
        sc.system.sigma_sf_db = sigma;
        detail::note(s, "fig4: " + name + " r=" + format_cell(r) + " sigma=" + format_cell(sigma));
        const auto gaps = gap_curve(s, sc);
        for (std::size_t j = 0; j < gaps.size(); ++j) {
            t.add({name, r, sigma, to_string(s.fig4_estimator), static_cast<std::int64_t>(s.t_grid[j]), gaps[j]});
        }
    };
    for (double r : s.r_grid) sweep("r", r, 0.0);
    for (double sigma : s.sigma_grid) sweep("sigma", 0.0, sigma);
    return t;
}

/// Reference iteration counts for LS estimates, keyed by (loading, correlation,
/// tolerance). Cells without a reference value are absent.
struct ReferenceTarget {
    double loading;
    Correlation correlation;
    double tolerance;
    double T;
};

inline const std::vector<ReferenceTarget>& reference_targets()
{
    static const std::vector<ReferenceTarget> t{
        {0.1, Correlation::Uncorrelated, 10.0, 93.0}, {0.1, Correlation::Correlated, 10.0, 95.0},
        {0.1, Correlation::Uncorrelated, 1.0, 293.0}, {0.1, Correlation::Correlated, 1.0, 333.0},
        {0.5, Correlation::Correlated, 10.0, 1983.0}, {0.5, Correlation::Uncorrelated, 1.0, 4960.0},
        {0.5, Correlation::Correlated, 1.0, 5062.0}};
    return t;
}

inline std::optional<double> reference_target(double loading, Correlation c, double tol)
{
    for (const auto& r : reference_targets()) {
        if (std::abs(r.loading - loading) < 1e-12 && r.correlation == c && std::abs(r.tolerance - tol) < 1e-12) {
            return r.T;
        }
    }
    return std::nullopt;
}

struct Fig5Result {
    ResultTable curves;
    ResultTable tradeoff;
    ResultTable thresholds;
    ResultTable ratio;
};

/// Upper-bound curves over M per loading factor, trade-off thresholds for the
/// reference iteration counts and the complexity-saving ratios.
inline Fig5Result run_fig5(const ExperimentSpec& s)
{
    s.validate();
    Fig5Result r{ResultTable(schema::fig5, metadata_for(s, "fig5")),
                 ResultTable(schema::fig5_tradeoff, metadata_for(s, "fig5:tradeoff")),
                 ResultTable(schema::fig5_thresholds, metadata_for(s, "fig5:thresholds")),
                 ResultTable(schema::fig5_ratio, metadata_for(s, "fig5:ratio"))};
    std::vector<std::int64_t> Ms;
    for (std::int64_t M = s.fig5_m_min; M <= s.fig5_m_max; ++M) Ms.push_back(M);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double loading : s.fig5_loadings) {
        const auto t10 = reference_target(loading, Correlation::Correlated, 10.0);
        const auto t1 = reference_target(loading, Correlation::Correlated, 1.0);
        for (const TradeoffRow& row : tradeoff_curve(loading, Ms, s.loading_rule, t10, t1)) {
            r.curves.add({loading, row.M, row.K, row.t_upper_rzf, row.t_upper_zf});
            r.tradeoff.add({row.M, row.K, loading, row.t_upper_zf, row.t_upper_rzf, row.T_target_10.value_or(nan),
                            row.T_target_1.value_or(nan)});
        }
    }
    for (const auto& ref : reference_targets()) {
        const std::int64_t m = tradeoff_threshold(ref.loading, ref.T, Scheme::RZF, s.loading_rule);
        r.thresholds.add({ref.loading, to_string(ref.correlation), ref.tolerance, ref.T, m});
    }
    const double bound = t_upper(200, 100, Scheme::RZF);
    for (double measured : {1953.0, 1983.0}) {
        r.ratio.add({std::int64_t{200}, std::int64_t{100}, bound, measured, complexity_ratio(bound, measured)});
    }
    return r;
}

} // namespace rkamimo::harness

#endif
