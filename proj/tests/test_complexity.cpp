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


#include "rkamimo/complexity.hpp"
#include "rkamimo/random.hpp"

#include <gtest/gtest.h>

using namespace rkamimo;

TEST(Costs, CanonicalRowsByHand)
{
    const ComplexityReport zf = cost_zf(100, 10, 190);
    EXPECT_EQ(zf.combining_mults, 15830);
    EXPECT_EQ(zf.combining_divs, 10);
    EXPECT_EQ(zf.reception_mults, 190000);
    EXPECT_EQ(zf.dl_mults, 0);
    const ComplexityReport rzf = cost_rzf(100, 10, 190);
    EXPECT_EQ(rzf.combining_mults, 16830);
    EXPECT_EQ(rzf.combining_divs, 10);
    EXPECT_EQ(cost_zf(37, 1, 5).combining_mults, 2 * 37);
    EXPECT_THROW(cost_zf(0, 1, 1), std::invalid_argument);
    EXPECT_THROW(cost_rzf(4, 2, 0), std::invalid_argument);
}

TEST(Costs, KaczmarzRow)
{
    const ComplexityReport r = cost_rka(100, 10, 93, 190);
    EXPECT_EQ(r.combining_mults, 11300);
    EXPECT_EQ(r.combining_divs, 0);
    EXPECT_EQ(r.reception_mults, 200000);
    EXPECT_EQ(cost_rka(100, 10, 0, 190).combining_mults, 2000);
    EXPECT_EQ(cost_rka(64, 8, 5, 100, HardwareMode::TSS).total(), cost_rka(64, 8, 5, 100).total());
    EXPECT_THROW(cost_rka(10, 2, -1, 5), std::invalid_argument);
}

TEST(Costs, RowDifferencesHoldEverywhere)
{
    for (std::int64_t M = 1; M <= 60; M += 7) {
        for (std::int64_t K = 1; K <= M; K += 3) {
            EXPECT_EQ(cost_rzf(M, K, 11).combining_mults - cost_zf(M, K, 11).combining_mults, K * M);
            EXPECT_EQ(cost_rzf(M, K, 11).combining_divs, K);
            EXPECT_EQ(cost_rka(M, K, 9, 11).reception_mults - cost_rzf(M, K, 11).reception_mults, M * K * K);
        }
    }
}

TEST(Costs, CubicTermIsExactInteger)
{
    for (std::int64_t K = 1; K <= 1000; ++K) {
        EXPECT_EQ((K * K * K - K) % 3, 0);
        // 2 * combining_mults reproduces the unsimplified numerator exactly.
        const std::int64_t M = 2 * K + 1;
        const std::int64_t twice = 3 * K * K * M + K * M + 2 * (K * K * K - K) / 3;
        EXPECT_EQ(2 * cost_zf(M, K, 1).combining_mults, twice);
    }
}

TEST(Costs, LeadingOrderScaling)
{
    for (std::int64_t M : {64, 128, 256}) {
        const std::int64_t K = M / 8;
        const double ratio = static_cast<double>(cost_zf(2 * M, 2 * K, 1).combining_mults) /
                             static_cast<double>(cost_zf(M, K, 1).combining_mults);
        EXPECT_NEAR(ratio, 8.0, 0.4);
    }
}

TEST(Costs, DownlinkIsSchemeIndependent)
{
    EXPECT_EQ(dl_cost(100, 10, 0), 1000);
    EXPECT_EQ(dl_cost(100, 10, 190), 1000 + 190000);
    const auto a = with_downlink(cost_zf(100, 10, 190), 100, 10, 50);
    const auto b = with_downlink(cost_rzf(100, 10, 190), 100, 10, 50);
    const auto c = with_downlink(cost_rka(100, 10, 93, 190), 100, 10, 50);
    EXPECT_EQ(a.dl_mults, b.dl_mults);
    EXPECT_EQ(b.dl_mults, c.dl_mults);
    EXPECT_EQ(a.total() - a.ul_total(), a.dl_mults);
    EXPECT_THROW(dl_cost(100, 10, -1), std::invalid_argument);
}

TEST(UpperBound, ClosedFormValues)
{
    EXPECT_EQ(t_upper(200, 100, Scheme::RZF), 6617.0);
    EXPECT_NEAR(t_upper(100, 10, Scheme::ZF), 38.4, 1e-12);
    for (std::int64_t M = 1; M < 300; M += 13) {
        for (std::int64_t K = 1; K <= M; K += 5) {
            EXPECT_NEAR(t_upper(M, K, Scheme::RZF) - t_upper(M, K, Scheme::ZF), static_cast<double>(K),
                        1e-9 * static_cast<double>(K * K));
            EXPECT_NEAR(t_upper(M, K, Scheme::RZF),
                        t_upper(static_cast<double>(M), static_cast<double>(K), Scheme::RZF),
                        1e-9 * std::max(1.0, t_upper(M, K, Scheme::RZF)));
        }
    }
    EXPECT_THROW(t_upper(10, 2, Scheme::RKA), std::invalid_argument);
    EXPECT_THROW(t_upper(0, 2, Scheme::RZF), std::invalid_argument);
}

TEST(UpperBound, BalancesTotalUplinkCost)
{
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        const auto M = static_cast<std::int64_t>(1 + rng.uniform() * 512);
        const auto K = static_cast<std::int64_t>(1 + rng.uniform() * static_cast<double>(M));
        const std::int64_t tau_ul = 190;
        for (Scheme s : {Scheme::ZF, Scheme::RZF}) {
            const ComplexityReport canon = s == Scheme::ZF ? cost_zf(M, K, tau_ul) : cost_rzf(M, K, tau_ul);
            // rKA total as a real function of T, evaluated at the bound.
            const double T = t_upper(M, K, s);
            const double rka = static_cast<double>(M) * T +
                               static_cast<double>(cost_rka(M, K, 0, tau_ul).ul_total());
            EXPECT_LE(std::abs(rka - static_cast<double>(canon.ul_total())), 1.0) << "M=" << M << " K=" << K;
        }
    }
}

TEST(UpperBound, IncreasingAboveThePositiveRoot)
{
    double prev = t_upper(20.0, 2.0, Scheme::RZF);
    for (int M = 21; M < 600; ++M) {
        const double now = t_upper(static_cast<double>(M), 0.1 * M, Scheme::RZF);
        EXPECT_GT(now, prev);
        prev = now;
    }
    // Leading coefficient at loading 0.1: 0.1^3/3 + 0.1^2/2.
    EXPECT_NEAR(t_upper(1e6, 1e5, Scheme::RZF) / 1e12, 0.001 / 3.0 + 0.005, 1e-6);
}

TEST(Threshold, PaperCrossings)
{
    EXPECT_EQ(tradeoff_threshold(0.1, 95.0, Scheme::RZF), 139);
    EXPECT_EQ(tradeoff_threshold(0.1, 333.0, Scheme::RZF), 255);
    // Neighbouring bound values, quoted to one decimal.
    EXPECT_LT(t_upper(138.0, 13.8, Scheme::RZF), 95.0);
    EXPECT_GE(t_upper(139.0, 13.9, Scheme::RZF), 95.0);
    EXPECT_LT(t_upper(254.0, 25.4, Scheme::RZF), 333.0);
    EXPECT_GE(t_upper(255.0, 25.5, Scheme::RZF), 333.0);
    EXPECT_NEAR(t_upper(138.0, 13.8, Scheme::RZF), 94.7, 0.1);
    EXPECT_NEAR(t_upper(139.0, 13.9, Scheme::RZF), 96.2, 0.1);
    EXPECT_NEAR(t_upper(254.0, 25.4, Scheme::RZF), 331.4, 0.1);
    EXPECT_NEAR(t_upper(255.0, 25.5, Scheme::RZF), 334.1, 0.1);
}

TEST(Threshold, BoundaryAndRoundingRule)
{
    const std::int64_t m1 = tradeoff_threshold(0.1, 1.0, Scheme::RZF);
    EXPECT_GE(t_upper(static_cast<double>(m1), 0.1 * m1, Scheme::RZF), 1.0);
    for (std::int64_t M = 10; M < m1; ++M) {
        EXPECT_LT(t_upper(static_cast<double>(M), 0.1 * M, Scheme::RZF), 1.0);
    }
    const std::int64_t nearest = tradeoff_threshold(0.1, 95.0, Scheme::RZF, LoadingRule::Nearest);
    EXPECT_GE(t_upper(nearest, std::llround(0.1 * nearest), Scheme::RZF), 95.0);
    EXPECT_LT(t_upper(nearest - 1, std::llround(0.1 * (nearest - 1)), Scheme::RZF), 95.0);
    EXPECT_THROW(tradeoff_threshold(0.0, 95.0, Scheme::RZF), std::invalid_argument);
    EXPECT_THROW(tradeoff_threshold(0.1, 0.5, Scheme::RZF), std::invalid_argument);
    EXPECT_THROW(tradeoff_threshold(0.1, 1e9, Scheme::RZF, LoadingRule::Continuous, 100), std::domain_error);
}

TEST(Threshold, SavingRatio)
{
    EXPECT_NEAR(complexity_ratio(t_upper(200, 100, Scheme::RZF), 1953.0), 3.39, 0.01);
    EXPECT_THROW(complexity_ratio(1.0, 0.0), std::invalid_argument);
}

TEST(Curves, TradeoffRows)
{
    const auto rows = tradeoff_curve(0.3, {10, 100, 200}, LoadingRule::Continuous, 655.0);
    ASSERT_EQ(rows.size(), 3U);
    EXPECT_DOUBLE_EQ(rows[1].K, 30.0);
    EXPECT_NEAR(rows[1].t_upper_rzf - rows[1].t_upper_zf, 30.0, 1e-12);
    EXPECT_TRUE(rows[0].T_target_10.has_value());
    EXPECT_FALSE(rows[0].T_target_1.has_value());
    EXPECT_EQ(tradeoff_curve(0.1, {5, 10}).size(), 1U); // K < 1 skipped
}
