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


#include "rkamimo/channel.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rkamimo;

namespace {

CMatrix sample_covariance(const CovarianceSet& cov, Index k, int draws, std::uint64_t seed)
{
    const ChannelSampler sampler(cov);
    Rng rng(seed);
    const Index M = cov.num_antennas();
    CMatrix S = CMatrix::Zero(M, M);
    for (int i = 0; i < draws; ++i) {
        const CVector g = sampler.sample(rng).col(k);
        S.noalias() += g * g.adjoint();
    }
    return S / static_cast<double>(draws);
}

CovarianceSet single(const CMatrix& R)
{
    CovarianceSet s;
    s.R.push_back(R);
    s.beta_db = RVector::Zero(1);
    s.shadow_db.push_back(RVector::Zero(1));
    return s;
}

} // namespace

TEST(Geometry, DropStaysInsideCellAndOutsideExclusionDisk)
{
    SystemConfig c;
    c.K = 100;
    Rng rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        const UserDrop d = drop_users(c, rng);
        ASSERT_EQ(d.distances.size(), 100);
        for (Index k = 0; k < c.K; ++k) {
            EXPECT_GE(d.distances(k), 35.0);
            EXPECT_LE(d.distances(k), 125.0 * std::sqrt(2.0));
            EXPECT_LE(std::abs(d.positions[k].x()), 125.0);
            EXPECT_LE(std::abs(d.positions[k].y()), 125.0);
            EXPECT_GE(d.angles(k), -kPi);
            EXPECT_LT(d.angles(k), kPi);
            EXPECT_NEAR(d.distances(k), d.positions[k].norm(), 1e-12);
        }
    }
}

TEST(Geometry, MeanDistanceMatchesSquareClosedForm)
{
    // Mean distance from the center of a square with half-side 1:
    // (sqrt(2) + asinh(1)) / 3.
    SystemConfig c;
    c.cell_side = 2.0;
    c.min_distance = 0.0;
    c.K = 100;
    Rng rng(2);
    double sum = 0.0;
    const int reps = 1000;
    for (int i = 0; i < reps; ++i) {
        sum += drop_users(c, rng).distances.sum();
    }
    const double expected = (std::sqrt(2.0) + std::asinh(1.0)) / 3.0;
    EXPECT_NEAR(expected, 0.7652, 1e-4);
    EXPECT_NEAR(sum / (reps * 100.0), expected, 0.003);
}

TEST(Geometry, ExclusionCoveringTheCellIsAnError)
{
    SystemConfig c;
    c.min_distance = 125.0 * std::sqrt(2.0);
    Rng rng(3);
    EXPECT_THROW(drop_users(c, rng), invalid_config);
}

TEST(Pathloss, ReferenceValuesAndSnrAnchors)
{
    EXPECT_DOUBLE_EQ(pathloss_db(1.0, -35.3, 3.76), -35.3);
    EXPECT_NEAR(pathloss_db(35.0, -35.3, 3.76), -93.357, 0.01);
    SystemConfig c;
    EXPECT_NEAR(average_snr_db(c, 35.0), 17.63, 0.01);
    EXPECT_NEAR(average_snr_db(c, 250.0), -14.47, 0.01);
    EXPECT_THROW(pathloss_db(0.0, -35.3, 3.76), std::domain_error);
    EXPECT_THROW(pathloss_db(-1.0, -35.3, 3.76), std::domain_error);
}

TEST(Covariance, UncorrelatedIsScaledIdentity)
{
    Rng rng(4);
    const auto e0 = covariance_uncorrelated(0.0, 0.0, 6, rng);
    EXPECT_EQ(e0.R, CMatrix::Identity(6, 6));
    const auto e = covariance_uncorrelated(-80.0, 4.0, 5, rng);
    EXPECT_NEAR(e.R.trace().real(), 5.0 * db_to_linear(-80.0 + e.shadow_db(0)),
                1e-14 * e.R.trace().real());
    EXPECT_TRUE((e.R - CMatrix::Identity(5, 5) * e.R(0, 0)).isZero(0.0));
}

TEST(Covariance, ShadowingMeanInDecibels)
{
    Rng rng(5);
    double sum = 0.0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
        sum += linear_to_db(covariance_uncorrelated(-60.0, 4.0, 1, rng).R(0, 0).real());
    }
    EXPECT_NEAR(sum / n, -60.0, 3.0 * 4.0 / 100.0);
}

TEST(Covariance, CorrelatedTwoByTwoByHand)
{
    Rng rng(6);
    const auto e = covariance_correlated(0.0, 0.5, 0.0, 0.0, 2, rng);
    CMatrix expected(2, 2);
    expected << 1.0, 0.5, 0.5, 1.0;
    EXPECT_LT((e.R - expected).norm(), 1e-14);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(e.R);
    EXPECT_NEAR(eig.eigenvalues()(0), 0.5, 1e-14);
    EXPECT_NEAR(eig.eigenvalues()(1), 1.5, 1e-14);
}

TEST(Covariance, CorrelatedReducesToUncorrelatedBitExactly)
{
    Rng a(7);
    Rng b(7);
    const auto corr = covariance_correlated(-70.0, 0.0, 1.2, 0.0, 8, a);
    const auto unc = covariance_uncorrelated(-70.0, 0.0, 8, b);
    EXPECT_EQ(corr.R, unc.R);
}

TEST(Covariance, CorrelatedStructure)
{
    Rng rng(8);
    for (int rep = 0; rep < 50; ++rep) {
        const double theta = rng.uniform(-kPi, kPi);
        const double r = rng.uniform();
        const auto e = covariance_correlated(-90.0, r, theta, 4.0, 16, rng);
        const double maxabs = e.R.cwiseAbs().maxCoeff();
        EXPECT_LE((e.R - e.R.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * maxabs);
        for (Index m = 0; m < 16; ++m) {
            EXPECT_NEAR(e.R(m, m).real(), db_to_linear(-90.0 + e.shadow_db(m)), 1e-12 * maxabs);
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(e.R, Eigen::EigenvaluesOnly);
        EXPECT_GE(eig.eigenvalues().minCoeff(), -1e-10 * e.R.trace().real() / 16.0);
        // Phase progression along the array.
        EXPECT_NEAR(std::arg(e.R(0, 1)), std::remainder(theta, 2.0 * kPi), 1e-9);
    }
    EXPECT_THROW(covariance_correlated(0.0, 1.2, 0.0, 0.0, 4, rng), invalid_config);
    EXPECT_THROW(covariance_correlated(0.0, -0.1, 0.0, 0.0, 4, rng), invalid_config);
}

TEST(Covariance, DrawForDropUsesPathloss)
{
    SystemConfig c;
    c.M = 8;
    c.K = 4;
    Rng rng(9);
    const UserDrop d = drop_users(c, rng);
    for (Correlation corr : {Correlation::Uncorrelated, Correlation::Correlated}) {
        const CovarianceSet set = draw_covariances(c, corr, d, rng);
        ASSERT_EQ(set.num_users(), 4);
        ASSERT_EQ(set.num_antennas(), 8);
        for (Index k = 0; k < 4; ++k) {
            EXPECT_DOUBLE_EQ(set.beta_db(k), pathloss_db(d.distances(k), c.gamma_db, c.alpha));
            EXPECT_EQ(set.shadow_db[k].size(), corr == Correlation::Correlated ? 8 : 1);
        }
    }
}

TEST(Sampling, ZeroAndWhiteCovariances)
{
    Rng rng(10);
    EXPECT_TRUE(sample_channel(single(CMatrix::Zero(4, 4)), rng).isZero(0.0));
    const CMatrix S = sample_covariance(single(CMatrix::Identity(3, 3)), 0, 10000, 11);
    for (Index m = 0; m < 3; ++m) {
        EXPECT_NEAR(S(m, m).real(), 1.0, 0.05);
    }
}

TEST(Sampling, TwoByTwoCorrelation)
{
    CMatrix R(2, 2);
    R << 1.0, 0.5, 0.5, 1.0;
    const CMatrix S = sample_covariance(single(R), 0, 10000, 12);
    EXPECT_NEAR(S(0, 1).real(), 0.5, 0.05 * 0.5 + 0.02);
    EXPECT_NEAR(S(0, 1).imag(), 0.0, 0.03);
}

TEST(Sampling, SampleCovarianceConverges)
{
    Rng rng(13);
    const auto e = covariance_correlated(0.0, 0.7, 0.9, 4.0, 8, rng);
    const CMatrix S = sample_covariance(single(e.R), 0, 100000, 14);
    EXPECT_LE((S - e.R).norm() / e.R.norm(), 0.05);
}

TEST(Sampling, RankDeficientCovarianceIsSupported)
{
    // r = 1 gives a rank-one covariance; the eigen square root must handle it.
    Rng rng(15);
    const auto e = covariance_correlated(0.0, 1.0, 0.3, 0.0, 6, rng);
    const CMatrix S = sample_covariance(single(e.R), 0, 20000, 16);
    EXPECT_LE((S - e.R).norm() / e.R.norm(), 0.05);
}

TEST(Sampling, NonPsdCovarianceIsRejected)
{
    CMatrix R(2, 2);
    R << 1.0, 2.0, 2.0, 1.0;
    EXPECT_THROW(ChannelSampler{single(R)}, numerical_error);
}
