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


#include "rkamimo/analysis.hpp"
#include "rkamimo/combining.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace rkamimo;
using rkamimo::testing::random_heterogeneous;
using rkamimo::testing::random_matrix;
using rkamimo::testing::rel_diff;

namespace {

RkaOptions rka(Index T, double xi, RkaInit init = RkaInit::Hybrid,
               RkaSchedule sched = RkaSchedule::Randomized, bool shared = false)
{
    RkaOptions o;
    o.iterations = T;
    o.xi = xi;
    o.init = init;
    o.schedule = sched;
    o.shared_rows = shared;
    return o;
}

} // namespace

TEST(Canonical, IdentityChannel)
{
    const Combiner c = rzf_combiner(CMatrix::Identity(3, 3), 1.0);
    EXPECT_LT((c.V - 0.5 * CMatrix::Identity(3, 3)).norm(), 1e-15);
    EXPECT_EQ(c.method, CombinerMethod::RZF);
}

TEST(Canonical, RzfMatchesPushThroughOracle)
{
    // G (G^H G + xi I)^{-1} = (G G^H + xi I)^{-1} G, solved by LU on the M x M side.
    for (std::uint64_t s = 0; s < 20; ++s) {
        const CMatrix G = random_matrix(8, 3, s);
        const double xi = 0.1 + static_cast<double>(s);
        CMatrix big = G * G.adjoint();
        big.diagonal().array() += xi;
        const CMatrix oracle = big.fullPivLu().solve(G);
        EXPECT_LT(rel_diff(rzf_combiner(G, xi).V, oracle), 1e-10);
    }
}

TEST(Canonical, ZfIdentityAndLimit)
{
    for (std::uint64_t s = 0; s < 100; ++s) {
        const CMatrix G = random_matrix(16, 4, 100 + s);
        const Combiner zf = zf_combiner(G);
        EXPECT_LE((G.adjoint() * zf.V - CMatrix::Identity(4, 4)).norm(), 1e-8 * 4);
        EXPECT_LE(rel_diff(rzf_combiner(G, 1e-10).V, zf.V), 1e-6);
        EXPECT_LE((rzf_combiner(G, 0.0).V - zf.V).norm(), 1e-12 * zf.V.norm());
    }
}

TEST(Canonical, OrthonormalColumnsAreTheirOwnZf)
{
    const CMatrix Q = random_matrix(7, 3, 9).householderQr().householderQ() * CMatrix::Identity(7, 3);
    EXPECT_LT((zf_combiner(Q).V - Q).norm(), 1e-12);
}

TEST(Canonical, RankDeficientZfReportsConditionNumber)
{
    CMatrix G = random_matrix(6, 3, 10);
    G.col(2) = G.col(0) * cplx(2.0, -1.0);
    try {
        zf_combiner(G);
        FAIL() << "expected numerical_error";
    } catch (const numerical_error& e) {
        EXPECT_NE(std::string(e.what()).find("condition number"), std::string::npos);
    }
    EXPECT_NO_THROW(rzf_combiner(G, 0.1)); // ridge keeps it solvable
    CMatrix bad = G;
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(rzf_combiner(bad, 1.0), numerical_error);
}

TEST(Probabilities, HandExamples)
{
    // Equal column norms.
    CMatrix G = random_matrix(5, 4, 11);
    for (Index k = 0; k < 4; ++k) {
        G.col(k).normalize();
    }
    for (double xi : {0.0, 0.3, 5.0}) {
        const RVector p = sample_probabilities(G, xi);
        for (Index k = 0; k < 4; ++k) {
            EXPECT_NEAR(p(k), 0.25, 1e-15);
        }
    }
    CMatrix H = CMatrix::Zero(3, 2);
    H(0, 0) = 1.0;
    EXPECT_EQ(sample_probabilities(H, 0.0), RVector::Unit(2, 0));
    H(0, 0) = std::sqrt(3.0);
    H(1, 1) = 1.0;
    const RVector p = sample_probabilities(H, 2.0);
    EXPECT_NEAR(p(0), 5.0 / 8.0, 1e-15);
    EXPECT_NEAR(p(1), 3.0 / 8.0, 1e-15);
    EXPECT_THROW(sample_probabilities(CMatrix::Zero(3, 2), 0.0), std::domain_error);
}

TEST(Probabilities, NormalizationAndScaling)
{
    for (std::uint64_t s = 0; s < 50; ++s) {
        const CMatrix G = random_heterogeneous(10, 5, s);
        const RVector p = sample_probabilities(G, 0.01);
        EXPECT_NEAR(p.sum(), 1.0, 1e-12);
        EXPECT_TRUE((p.array() >= 0.0).all());
        EXPECT_LT((sample_probabilities(2.0 * G, 0.04) - p).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(Kaczmarz, FirstHybridStepByHand)
{
    const CMatrix G = random_matrix(6, 3, 12);
    const double xi = 0.7;
    const auto D = rka_parl_checkpoints(G, rka(1, xi), {1}, 99).front();
    for (Index k = 0; k < 3; ++k) {
        const double den = G.col(k).squaredNorm() + xi;
        CVector z = CVector::Zero(3);
        z(k) = 1.0 / den;
        EXPECT_LT((D.col(k) - z).norm(), 1e-15);
        EXPECT_LT((G * D.col(k) - G.col(k) / den).norm(), 1e-15);
    }
}

TEST(Kaczmarz, SingleUserMatchesRzf)
{
    const CMatrix g = random_matrix(9, 1, 13);
    for (RkaSchedule s : {RkaSchedule::Randomized, RkaSchedule::Cyclic}) {
        for (RkaInit init : {RkaInit::Hybrid, RkaInit::Plain}) {
            const Combiner c = rka_parl(g, rka(3, 0.5, init, s), 1);
            EXPECT_LT(rel_diff(c.V, rzf_combiner(g, 0.5).V), 1e-14);
        }
    }
}

TEST(Kaczmarz, ConvergesToRzfOracle)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const CMatrix G = random_matrix(8, 2, 200 + seed);
        const Combiner c = rka_parl(G, rka(10000, 1.0), seed);
        EXPECT_LE(rel_diff(c.V, rzf_combiner(G, 1.0).V), 1e-6);
        EXPECT_EQ(c.V, G * *c.D);
        EXPECT_EQ(c.method, CombinerMethod::RkaHybrid);
    }
}

TEST(Kaczmarz, StateIdentityEveryIteration)
{
    double worst = 0.0;
    for (std::uint64_t s = 0; s < 30; ++s) {
        Rng pick(s);
        const Index M = 4 + static_cast<Index>(pick.uniform() * 28);
        const Index K = 1 + static_cast<Index>(pick.uniform() * std::min<double>(8, M));
        const CMatrix G = random_heterogeneous(M, K, 300 + s);
        for (RkaInit init : {RkaInit::Hybrid, RkaInit::Plain}) {
            for (RkaSchedule sch : {RkaSchedule::Randomized, RkaSchedule::Cyclic}) {
                rka_parl(G, rka(60, 0.05, init, sch), s, [&](const RkaStep& st) {
                    const double n = std::max(st.u.norm(), 1e-300);
                    worst = std::max(worst, (st.u - G * st.z).norm() / n);
                });
            }
        }
    }
    EXPECT_LE(worst, 1e-10);
}

TEST(Kaczmarz, ResidualVanishesAtFixedPoint)
{
    const CMatrix G = random_matrix(10, 4, 14);
    const double xi = 0.3;
    const RzfSolution s = rzf_solution(G, xi);
    for (Index k = 0; k < 4; ++k) {
        for (Index r = 0; r < 4; ++r) {
            const cplx target = r == k ? 1.0 : 0.0;
            const cplx eta = (target - G.col(r).dot(s.V.col(k)) - xi * s.D(r, k)) /
                             (G.col(r).squaredNorm() + xi);
            EXPECT_LT(std::abs(eta), 1e-10);
        }
    }
}

TEST(Kaczmarz, PlainInitNeverTouchesZeroProbabilityUser)
{
    CMatrix G = random_matrix(6, 2, 15);
    G.col(1).setZero();
    // xi = 0 makes p = (1, 0) exactly.
    const auto Ds = rka_parl_checkpoints(G, rka(500, 0.0, RkaInit::Plain), {1, 10, 100, 500}, 3);
    for (const CMatrix& D : Ds) {
        EXPECT_TRUE(D.col(1).isZero(0.0));
    }
    // Hybrid must pick the zero row first and fail loudly instead of dividing by zero.
    EXPECT_THROW(rka_parl(G, rka(5, 0.0), 3), numerical_error);
}

TEST(Kaczmarz, ScheduleAndStreamVariantsConverge)
{
    const CMatrix G = random_matrix(12, 3, 16);
    const CMatrix oracle = rzf_combiner(G, 0.5).V;
    for (bool shared : {false, true}) {
        EXPECT_LE(rel_diff(rka_parl(G, rka(4000, 0.5, RkaInit::Hybrid, RkaSchedule::Randomized, shared), 4).V, oracle),
                  1e-8);
    }
    const Combiner cyc = rka_parl(G, rka(4000, 0.5, RkaInit::Plain, RkaSchedule::Cyclic), 0);
    EXPECT_LE(rel_diff(cyc.V, oracle), 1e-8);
    EXPECT_EQ(cyc.method, CombinerMethod::RkaCyclic);
}

TEST(Kaczmarz, ZfEmulationWithZeroRegularization)
{
    const CMatrix G = random_matrix(16, 2, 17);
    EXPECT_LE(rel_diff(rka_parl(G, rka(20000, 0.0), 5).V, zf_combiner(G).V), 1e-6);
}

TEST(Kaczmarz, CheckpointsEqualSeparateRunsAndSeedsReplay)
{
    const CMatrix G = random_heterogeneous(10, 4, 18);
    const std::vector<Index> grid{0, 1, 7, 50, 200};
    const auto Ds = rka_parl_checkpoints(G, rka(200, 0.1), grid, 77);
    EXPECT_TRUE(Ds[0].isZero(0.0));
    for (std::size_t j = 1; j < grid.size(); ++j) {
        EXPECT_EQ(Ds[j], *rka_parl(G, rka(grid[j], 0.1), 77).D);
    }
    EXPECT_NE(*rka_parl(G, rka(50, 0.1), 77).D, *rka_parl(G, rka(50, 0.1), 78).D);
    Rng a(5);
    Rng b(5);
    EXPECT_EQ(rka_parl(G, rka(30, 0.1), a).V, rka_parl(G, rka(30, 0.1), b).V);
}

TEST(Kaczmarz, InputValidation)
{
    const CMatrix G = random_matrix(4, 2, 19);
    EXPECT_THROW(rka_parl(G, rka(0, 0.1), 1), std::invalid_argument);
    EXPECT_THROW(rka_parl(G, rka(5, -1.0), 1), std::invalid_argument);
    EXPECT_THROW(rka_parl_checkpoints(G, rka(5, 0.1), {3, 1}, 1), std::invalid_argument);
    EXPECT_THROW(rka_parl_checkpoints(G, rka(5, 0.1), {6}, 1), std::invalid_argument);
    CMatrix bad = G;
    bad(1, 1) = std::numeric_limits<double>::infinity();
    EXPECT_THROW(rka_parl(bad, rka(5, 0.1), 1), numerical_error);
}

TEST(Kaczmarz, GapDecaysAtPredictedRate)
{
    // Relative gap after T iterations <= 2 (1 - kappa)^(T/2) in >= 95% of runs.
    int good = 0;
    const int runs = 200;
    for (int s = 0; s < runs; ++s) {
        const CMatrix G = random_matrix(12, 3, 400 + s);
        const double xi = 0.2;
        const double kappa = average_gain_closed(G, xi).kappa_closed;
        const RzfSolution target = rzf_solution(G, xi);
        const Index T = 60;
        const CMatrix D = *rka_parl(G, rka(T, xi), static_cast<std::uint64_t>(s)).D;
        bool ok = true;
        for (Index k = 0; k < 3; ++k) {
            const double gap = state_gap(G * D.col(k), D.col(k), target, k, xi) / state_norm(target, k, xi);
            ok = ok && gap <= 2.0 * std::pow(1.0 - kappa, T / 2.0);
        }
        good += ok ? 1 : 0;
    }
    EXPECT_GE(good, 190);
}

TEST(Kaczmarz, HybridBeatsPlainOnHeterogeneousPowers)
{
    const Index M = 16;
    const Index K = 4;
    const double xi = 0.01;
    const std::vector<Index> grid{1, 2, 4, 8, 16, 32, 64};
    for (std::uint64_t inst = 0; inst < 5; ++inst) {
        const CMatrix G = random_heterogeneous(M, K, 500 + inst, 25.0);
        const RzfSolution target = rzf_solution(G, xi);
        std::vector<double> hybrid(grid.size(), 0.0);
        std::vector<double> plain(grid.size(), 0.0);
        for (std::uint64_t s = 0; s < 150; ++s) {
            const auto Dh = rka_parl_checkpoints(G, rka(64, xi), grid, s);
            const auto Dp = rka_parl_checkpoints(G, rka(64, xi, RkaInit::Plain), grid, s);
            for (std::size_t j = 0; j < grid.size(); ++j) {
                for (Index k = 0; k < K; ++k) {
                    hybrid[j] += std::pow(state_gap(G * Dh[j].col(k), Dh[j].col(k), target, k, xi), 2);
                    plain[j] += std::pow(state_gap(G * Dp[j].col(k), Dp[j].col(k), target, k, xi), 2);
                }
            }
        }
        for (std::size_t j = 0; j < grid.size(); ++j) {
            EXPECT_LE(hybrid[j], plain[j]) << "instance " << inst << " T=" << grid[j];
        }
    }
}

TEST(Kaczmarz, TraceRecorderCsv)
{
    const CMatrix G = random_matrix(5, 2, 20);
    RkaTraceRecorder rec(rzf_solution(G, 1.0), 1.0);
    rka_parl(G, rka(3, 1.0), 1, rec);
    ASSERT_EQ(rec.rows().size(), 6U);
    EXPECT_EQ(rec.rows()[0].r, 0);
    EXPECT_EQ(rec.rows()[3].r, 1);
    std::ostringstream os;
    rec.write_csv(os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "t,k,r,abs_eta,gap");
    std::getline(in, line);
    EXPECT_EQ(line.rfind("1,0,0,", 0), 0U);
    RkaTraceRecorder bare;
    rka_parl(G, rka(2, 1.0), 1, bare);
    EXPECT_TRUE(std::isnan(bare.rows()[0].gap));
}

TEST(Reception, RecoverSignals)
{
    Combiner id;
    id.V = CMatrix::Identity(3, 3);
    const CVector y = random_matrix(3, 1, 21).col(0);
    EXPECT_EQ(recover_signals(id, y), y);

    const CMatrix G = random_matrix(12, 3, 22);
    const CVector s = random_matrix(3, 1, 23).col(0);
    EXPECT_LT((recover_signals(zf_combiner(G), CVector(G * s)) - s).norm(), 1e-8);

    CMatrix g(1, 1);
    g(0, 0) = 1.0;
    CVector y1(1);
    y1(0) = 2.0;
    EXPECT_NEAR(std::abs(recover_signals(rzf_combiner(g, 1.0), y1)(0) - 1.0), 0.0, 1e-15);

    const CMatrix Y = random_matrix(12, 5, 24);
    const Combiner c = rzf_combiner(G, 0.1);
    EXPECT_LT((recover_signals(c, Y) - c.V.adjoint() * Y).norm(), 1e-12);
    EXPECT_THROW(recover_signals(c, CVector(CVector::Zero(5))), std::invalid_argument);
}

TEST(Duality, PrecoderNormalization)
{
    const CMatrix G = random_heterogeneous(10, 3, 25);
    const Combiner c = rzf_combiner(G, 0.2);
    const CMatrix W = precoder_from_combiner(c);
    for (Index k = 0; k < 3; ++k) {
        EXPECT_NEAR(W.col(k).norm(), 1.0, 1e-12);
    }
    Combiner scaled = c;
    scaled.V *= 7.0;
    EXPECT_LT((precoder_from_combiner(scaled) - W).norm(), 1e-12);
    Combiner broken = c;
    broken.V.col(1).setZero();
    EXPECT_THROW(precoder_from_combiner(broken), numerical_error);
}

TEST(Duality, PrecodeSignal)
{
    const CMatrix W = random_matrix(8, 3, 26).householderQr().householderQ() * CMatrix::Identity(8, 3);
    EXPECT_TRUE(precode_signal(W, CVector::Zero(3)).isZero(0.0));
    CVector one(1);
    one(0) = cplx(0.6, -0.8) * 3.0;
    EXPECT_NEAR(precode_signal(W.leftCols(1), one).norm(), 3.0, 1e-12);
    Rng rng(27);
    double power = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        power += precode_signal(W, rng.cnormal_vector(3)).squaredNorm();
    }
    EXPECT_NEAR(power / n, 3.0, 0.05 * 3.0);
    EXPECT_THROW(precode_signal(2.0 * W, CVector::Zero(3)), std::invalid_argument);
}

TEST(Kaczmarz, DegenerateProbabilityOverride)
{
    CMatrix G = random_matrix(8, 3, 21);
    G.col(2).setZero();
    const double xi = 0.1;
    RkaOptions o = rka(300, xi, RkaInit::Plain);
    o.probabilities = RVector::Zero(3);
    (*o.probabilities) << 0.5, 0.5, 0.0;
    const RzfSolution target = rzf_solution(G, xi);
    // Plain start never selects the zero-probability row: its own solve stays at zero.
    EXPECT_TRUE(rka_parl(G, o, 2).D->col(2).isZero(0.0));
    // The hybrid start selects it once, which solves that UE exactly.
    o.init = RkaInit::Hybrid;
    const CMatrix D = *rka_parl(G, o, 2).D;
    EXPECT_LE((D.col(2) - target.D.col(2)).norm() / target.D.col(2).norm(), 1e-12);
    o.probabilities = RVector::Constant(3, 0.5);
    EXPECT_THROW(rka_parl(G, o, 2), std::invalid_argument);
}
