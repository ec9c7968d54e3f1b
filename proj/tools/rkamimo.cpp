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


// Command-line harness: regenerates figure/table CSVs and runs the
// acceptance checks.
//
//   rkamimo <fig1|fig2|fig3|fig4|fig5|table3|validate> --seed N [options]

#include "rkamimo/harness/checks.hpp"
#include "rkamimo/harness/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>

namespace {

using namespace rkamimo;
using namespace rkamimo::harness;

struct Options {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "results";
    std::optional<std::int64_t> trials;
    std::optional<std::int64_t> drops;
    std::optional<std::size_t> threads;
    bool quick = false;
    bool verbose = false;
};

// An unset or empty RKAMIMO_SEED leaves the seed to --seed or the config.
std::optional<std::uint64_t> env_seed()
{
    const char* v = std::getenv("RKAMIMO_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    return parse_seed(v, "RKAMIMO_SEED");
}

ExperimentSpec resolve(const Options& o)
{
    KeyValueConfig kv = o.config.empty() ? KeyValueConfig{} : KeyValueConfig::load(o.config);
    std::optional<std::uint64_t> seed = env_seed();
    if (o.seed) seed = o.seed; // the flag wins over the environment
    ExperimentSpec s = spec_from_config(kv, seed);
    if (o.trials) s.plan.n_realizations = static_cast<Index>(*o.trials);
    if (o.drops) s.plan.n_drops = static_cast<Index>(*o.drops);
    if (o.threads) s.plan.threads = *o.threads;
    if (o.verbose) s.log = [](const std::string& m) { std::cerr << m << "\n"; };
    s.validate();
    return s;
}

void save(const ResultTable& t, const Options& o, const std::string& name)
{
    t.save(o.out, name);
    std::cout << (std::filesystem::path(o.out) / (name + ".csv")).string() << " (" << t.size() << " rows)\n";
}

int run(const std::string& cmd, const Options& o)
{
    if (cmd == "validate") {
        // Seed is still mandatory so that validation runs are reproducible by construction.
        const ExperimentSpec s = resolve(o);
        int failed = 0;
        run_all_checks(o.quick ? Scale::Quick : Scale::Full, s.plan.seed, s.plan.threads, [&](const CheckResult& r) {
            std::cout << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
            failed += r.pass ? 0 : 1;
        });
        return failed == 0 ? 0 : 1;
    }
    const ExperimentSpec s = resolve(o);
    if (cmd == "fig1") {
        save(run_fig1(s), o, "fig1");
    } else if (cmd == "fig2") {
        const Fig2Result r = run_fig2(s);
        save(r.hybrid, o, "fig2");
        save(r.plain, o, "fig2_plain");
    } else if (cmd == "fig3") {
        save(run_fig3(s), o, "fig3");
    } else if (cmd == "fig4") {
        save(run_fig4(s), o, "fig4");
    } else if (cmd == "fig5") {
        const Fig5Result r = run_fig5(s);
        save(r.curves, o, "fig5");
        save(r.tradeoff, o, "fig5_tradeoff");
        save(r.thresholds, o, "fig5_thresholds");
        save(r.ratio, o, "fig5_ratio");
    } else if (cmd == "table3") {
        save(run_table3(s), o, "table3");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Randomized Kaczmarz emulation of RZF/ZF combining: experiment harness"};
    app.require_subcommand(1, 1);
    Options o;
    const std::vector<std::pair<std::string, std::string>> commands{
        {"fig1", "CDF of the row-sampling probabilities"},
        {"fig2", "SE versus iterations, hybrid and plain starts"},
        {"fig3", "gap to RZF versus iterations per loading factor"},
        {"fig4", "gap versus antenna correlation and shadowing spread"},
        {"fig5", "complexity upper bounds and trade-off thresholds"},
        {"table3", "iterations to reach a given gap to RZF"},
        {"validate", "run the acceptance checks"}};
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
        sub->add_option("--seed", o.seed, "master seed (or RKAMIMO_SEED / experiment.seed)");
        sub->add_option("--out", o.out, "output directory")->capture_default_str();
        sub->add_option("--trials", o.trials, "channel realizations per drop")->check(CLI::PositiveNumber);
        sub->add_option("--drops", o.drops, "user drops")->check(CLI::PositiveNumber);
        sub->add_option("--threads", o.threads, "worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        sub->add_flag("-v,--verbose", o.verbose, "progress on stderr");
        if (name == "validate") sub->add_flag("--quick", o.quick, "reduced instance counts");
    }
    CLI11_PARSE(app, argc, argv);
    try {
        return run(app.get_subcommands().front()->get_name(), o);
    } catch (const std::exception& e) {
        std::cerr << "rkamimo: " << e.what() << "\n";
        return 2;
    }
}
