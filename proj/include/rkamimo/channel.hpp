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


#ifndef RKAMIMO_CHANNEL_HPP
#define RKAMIMO_CHANNEL_HPP

#include "config.hpp"
#include "random.hpp"

#include <Eigen/Eigenvalues>

#include <vector>

namespace rkamimo {

/// UE positions relative to a BS at the cell center.
struct UserDrop {
    std::vector<Eigen::Vector2d> positions; // m
    RVector distances;                      // m
    RVector angles;                         // rad, in [-pi, pi)
};

/// Per-UE covariance matrices for one drop. Shadowing draws are kept so the
/// drop can be inspected or replayed.
struct CovarianceSet {
    std::vector<CMatrix> R;               // K Hermitian M x M, linear units
    RVector beta_db;                      // pathloss per UE, dB
    std::vector<RVector> shadow_db;       // 1 draw (uncorrelated) or M draws (correlated) per UE

    Index num_users() const { return static_cast<Index>(R.size()); }
    Index num_antennas() const { return R.empty() ? 0 : R.front().rows(); }
};

/// One UE's covariance matrix plus the shadowing it was built from.
struct CovarianceEntry {
    CMatrix R;
    RVector shadow_db;
};

/// Uniform UE placement over the square cell minus the exclusion disk around
/// the BS, by rejection sampling.
inline UserDrop drop_users(const SystemConfig& cfg, Rng& rng)
{
    cfg.validate();
    const double half = cfg.cell_side / 2.0;
    if (cfg.min_distance >= half * std::sqrt(2.0)) {
        throw invalid_config("drop_users: min_distance excludes the whole cell");
    }
    UserDrop drop;
    drop.positions.reserve(static_cast<std::size_t>(cfg.K));
    drop.distances.resize(cfg.K);
    drop.angles.resize(cfg.K);
    for (Index k = 0; k < cfg.K; ++k) {
        Eigen::Vector2d p;
        do {
            p.x() = rng.uniform(-half, half);
            p.y() = rng.uniform(-half, half);
        } while (p.norm() < cfg.min_distance);
        drop.positions.push_back(p);
        drop.distances(k) = p.norm();
        double theta = std::atan2(p.y(), p.x());
        if (theta >= kPi) {
            theta -= 2.0 * kPi;
        }
        drop.angles(k) = theta;
    }
    return drop;
}

/// Log-distance pathloss, Gamma - 10 alpha log10(d) [dB].
inline double pathloss_db(double distance, double gamma_db, double alpha)
{
    if (!(distance > 0.0)) {
        throw std::domain_error("pathloss_db: distance must be positive");
    }
    return gamma_db - 10.0 * alpha * std::log10(distance);
}

/// Average SNR of a UE at `distance` without shadowing [dB].
inline double average_snr_db(const SystemConfig& cfg, double distance)
{
    return pathloss_db(distance, cfg.gamma_db, cfg.alpha) + cfg.rho_ul_db();
}

/// Scaled identity with one shadowing draw for the whole array.
inline CovarianceEntry covariance_uncorrelated(double beta_db, double sigma_sf_db, Index M, Rng& rng)
{
    if (M < 1) {
        throw invalid_config("covariance_uncorrelated: M must be >= 1");
    }
    CovarianceEntry e;
    e.shadow_db.resize(1);
    e.shadow_db(0) = rng.normal(0.0, sigma_sf_db);
    const double power = db_to_linear(beta_db) * db_to_linear(e.shadow_db(0));
    e.R = CMatrix::Identity(M, M) * power;
    return e;
}

namespace detail {

// Eigen-clip a Hermitian matrix whose smallest eigenvalue is slightly
// negative. Fails beyond -1e-10 * trace / M.
inline void clip_to_psd(CMatrix& R, const char* who)
{
    const Index M = R.rows();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
    if (eig.info() != Eigen::Success) {
        throw numerical_error(std::string(who) + ": eigendecomposition failed");
    }
    const double lmin = eig.eigenvalues().minCoeff();
    const double tol = 1e-10 * std::abs(R.trace().real()) / static_cast<double>(M);
    if (lmin < -tol) {
        throw numerical_error(std::string(who) + ": covariance is not positive semidefinite");
    }
    if (lmin < 0.0) {
        const RVector lam = eig.eigenvalues().cwiseMax(0.0);
        R = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
        R = (0.5 * (R + R.adjoint())).eval();
    }
}

} // namespace detail

/// Exponential-correlation ULA model with per-antenna shadowing:
/// [R]_{m,n} = beta r^{|n-m|} e^{i(n-m)theta} 10^{(f_m + f_n)/20}.
inline CovarianceEntry covariance_correlated(double beta_db, double r_corr, double theta,
                                             double sigma_sf_db, Index M, Rng& rng)
{
    if (!(r_corr >= 0.0 && r_corr <= 1.0)) {
        throw invalid_config("covariance_correlated: r_corr must lie in [0, 1]");
    }
    if (M < 1) {
        throw invalid_config("covariance_correlated: M must be >= 1");
    }
    CovarianceEntry e;
    e.shadow_db.resize(M);
    for (Index m = 0; m < M; ++m) {
        e.shadow_db(m) = rng.normal(0.0, sigma_sf_db);
    }
    const double beta = db_to_linear(beta_db);
    e.R.resize(M, M);
    for (Index n = 0; n < M; ++n) {
        for (Index m = 0; m < M; ++m) {
            const double lag = static_cast<double>(n - m);
            const double mag = beta * std::pow(r_corr, std::abs(lag)) *
                               std::pow(10.0, (e.shadow_db(m) + e.shadow_db(n)) / 20.0);
            e.R(m, n) = mag * std::polar(1.0, lag * theta);
        }
    }
    detail::clip_to_psd(e.R, "covariance_correlated");
    return e;
}

/// Covariances for every UE of a drop under the chosen correlation model.
inline CovarianceSet draw_covariances(const SystemConfig& cfg, Correlation corr, const UserDrop& drop,
                                      Rng& rng)
{
    CovarianceSet set;
    const Index K = static_cast<Index>(drop.distances.size());
    set.beta_db.resize(K);
    set.R.reserve(static_cast<std::size_t>(K));
    set.shadow_db.reserve(static_cast<std::size_t>(K));
    for (Index k = 0; k < K; ++k) {
        set.beta_db(k) = pathloss_db(drop.distances(k), cfg.gamma_db, cfg.alpha);
        CovarianceEntry e = corr == Correlation::Correlated
            ? covariance_correlated(set.beta_db(k), cfg.r_corr, drop.angles(k), cfg.sigma_sf_db, cfg.M, rng)
            : covariance_uncorrelated(set.beta_db(k), cfg.sigma_sf_db, cfg.M, rng);
        set.R.push_back(std::move(e.R));
        set.shadow_db.push_back(std::move(e.shadow_db));
    }
    return set;
}

/// Precomputed PSD square roots for repeated channel draws from one
/// covariance set. Scaled-identity covariances take a diagonal fast path.
class ChannelSampler {
public:
    explicit ChannelSampler(const CovarianceSet& cov)
    {
        const Index K = cov.num_users();
        factors_.resize(static_cast<std::size_t>(K));
        scale_.assign(static_cast<std::size_t>(K), -1.0);
        for (Index k = 0; k < K; ++k) {
            const CMatrix& R = cov.R[static_cast<std::size_t>(k)];
            const Index M = R.rows();
            const double d0 = R(0, 0).real();
            const bool scalar = (R - CMatrix::Identity(M, M) * d0).cwiseAbs().maxCoeff() == 0.0;
            if (scalar && d0 >= 0.0) {
                scale_[static_cast<std::size_t>(k)] = std::sqrt(d0);
                continue;
            }
            Eigen::SelfAdjointEigenSolver<CMatrix> eig(R);
            if (eig.info() != Eigen::Success) {
                throw numerical_error("sample_channel: eigendecomposition failed");
            }
            const double tol = 1e-10 * std::abs(R.trace().real()) / static_cast<double>(M);
            if (eig.eigenvalues().minCoeff() < -tol) {
                throw numerical_error("sample_channel: covariance is not positive semidefinite");
            }
            const RVector root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
            factors_[static_cast<std::size_t>(k)] = eig.eigenvectors() * root.asDiagonal();
        }
        M_ = cov.num_antennas();
    }

    /// One realization G (M x K), column k ~ CN(0, R_k).
    CMatrix sample(Rng& rng) const
    {
        const Index K = static_cast<Index>(scale_.size());
        CMatrix G(M_, K);
        for (Index k = 0; k < K; ++k) {
            CVector w = rng.cnormal_vector(M_);
            const auto idx = static_cast<std::size_t>(k);
            if (scale_[idx] >= 0.0) {
                G.col(k) = scale_[idx] * w;
            } else {
                G.col(k) = factors_[idx] * w;
            }
        }
        return G;
    }

private:
    Index M_ = 0;
    std::vector<CMatrix> factors_;
    std::vector<double> scale_;
};

inline CMatrix sample_channel(const CovarianceSet& cov, Rng& rng)
{
    return ChannelSampler(cov).sample(rng);
}

} // namespace rkamimo

#endif
