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


#ifndef RKAMIMO_ESTIMATION_HPP
#define RKAMIMO_ESTIMATION_HPP

#include "channel.hpp"

#include <Eigen/Cholesky>

#include <vector>

namespace rkamimo {

/// Received pilot signals after correlating with each UE's orthogonal pilot:
/// column k is sqrt(tau_p rho) g_k + n_k with n_k ~ CN(0, I).
struct PilotObservation {
    CMatrix Yp;
    double gain = 1.0; // sqrt(tau_p * rho_ul)
};

struct ChannelEstimate {
    CMatrix Ghat;
    Estimator estimator = Estimator::True;
    std::vector<CMatrix> error_cov; // MMSE only
};

inline double pilot_gain(const SystemConfig& cfg)
{
    return std::sqrt(static_cast<double>(cfg.pilot_length()) * cfg.rho_ul());
}

/// Pilot observation with an explicitly supplied noise matrix.
inline PilotObservation observe_pilots(const CMatrix& G, const SystemConfig& cfg, const CMatrix& noise)
{
    if (cfg.pilot_length() < G.cols()) {
        throw invalid_config("observe_pilots: tau_p must be >= K");
    }
    PilotObservation obs;
    obs.gain = pilot_gain(cfg);
    obs.Yp = obs.gain * G + noise;
    return obs;
}

inline PilotObservation observe_pilots(const CMatrix& G, const SystemConfig& cfg, Rng& rng)
{
    return observe_pilots(G, cfg, rng.cnormal_matrix(G.rows(), G.cols()));
}

inline ChannelEstimate ls_estimate(const PilotObservation& obs)
{
    ChannelEstimate est;
    est.Ghat = obs.Yp / obs.gain;
    est.estimator = Estimator::LS;
    return est;
}

inline ChannelEstimate ls_estimate(const PilotObservation& obs, const SystemConfig& /*cfg*/)
{
    return ls_estimate(obs);
}

inline ChannelEstimate true_estimate(const CMatrix& G)
{
    ChannelEstimate est;
    est.Ghat = G;
    est.estimator = Estimator::True;
    return est;
}

/// Per-UE MMSE filters A_k = R_k (R_k + I / (tau_p rho))^{-1} and error
/// covariances, computed once per covariance set and reused for every
/// small-scale realization of the drop.
class MmseFilter {
public:
    MmseFilter(const CovarianceSet& cov, double inverse_pilot_snr)
    {
        if (!(inverse_pilot_snr > 0.0)) {
            throw invalid_config("mmse_estimate: pilot SNR must be finite and positive");
        }
        const Index K = cov.num_users();
        filters_.reserve(static_cast<std::size_t>(K));
        error_cov_.reserve(static_cast<std::size_t>(K));
        for (Index k = 0; k < K; ++k) {
            const CMatrix& R = cov.R[static_cast<std::size_t>(k)];
            CMatrix Q = R;
            Q.diagonal().array() += inverse_pilot_snr;
            Eigen::LLT<CMatrix> llt(Q);
            if (llt.info() != Eigen::Success) {
                throw numerical_error("mmse_estimate: pilot covariance is not positive definite");
            }
            // R Q^{-1} = (Q^{-1} R)^H because both are Hermitian.
            CMatrix A = llt.solve(R).adjoint();
            CMatrix C = R - A * R;
            C = (0.5 * (C + C.adjoint())).eval();
            filters_.push_back(std::move(A));
            error_cov_.push_back(std::move(C));
        }
    }

    MmseFilter(const CovarianceSet& cov, const SystemConfig& cfg)
        : MmseFilter(cov, 1.0 / (static_cast<double>(cfg.pilot_length()) * cfg.rho_ul()))
    {
    }

    ChannelEstimate apply(const PilotObservation& obs) const
    {
        ChannelEstimate est;
        const Index K = obs.Yp.cols();
        est.Ghat.resize(obs.Yp.rows(), K);
        for (Index k = 0; k < K; ++k) {
            est.Ghat.col(k) = filters_[static_cast<std::size_t>(k)] * (obs.Yp.col(k) / obs.gain);
        }
        est.estimator = Estimator::MMSE;
        est.error_cov = error_cov_;
        return est;
    }

    const std::vector<CMatrix>& error_covariances() const { return error_cov_; }

private:
    std::vector<CMatrix> filters_;
    std::vector<CMatrix> error_cov_;
};

inline ChannelEstimate mmse_estimate(const PilotObservation& obs, const CovarianceSet& cov,
                                     const SystemConfig& cfg)
{
    return MmseFilter(cov, cfg).apply(obs);
}

/// Per-UE squared error normalized by E||g_k||^2 = tr(R_k) for one
/// realization; average over realizations for the NMSE.
inline RVector nmse(const ChannelEstimate& est, const CMatrix& G, const CovarianceSet& cov)
{
    if (est.Ghat.rows() != G.rows() || est.Ghat.cols() != G.cols() ||
        G.cols() != cov.num_users()) {
        throw std::invalid_argument("nmse: shape mismatch");
    }
    RVector out(G.cols());
    for (Index k = 0; k < G.cols(); ++k) {
        const double tr = cov.R[static_cast<std::size_t>(k)].trace().real();
        if (!(tr > 0.0)) {
            throw std::domain_error("nmse: covariance has zero trace");
        }
        out(k) = (est.Ghat.col(k) - G.col(k)).squaredNorm() / tr;
    }
    return out;
}

/// Produces channel estimates of one kind for a fixed drop.
class ChannelEstimator {
public:
    ChannelEstimator(Estimator kind, const CovarianceSet& cov, const SystemConfig& cfg)
        : kind_(kind), cfg_(cfg)
    {
        if (kind_ == Estimator::MMSE) {
            mmse_.emplace(cov, cfg);
        }
    }

    Estimator kind() const { return kind_; }

    /// Draws pilot noise from `rng` (except for perfect CSI) and estimates.
    ChannelEstimate operator()(const CMatrix& G, Rng& rng) const
    {
        switch (kind_) {
        case Estimator::True:
            return true_estimate(G);
        case Estimator::LS:
            return ls_estimate(observe_pilots(G, cfg_, rng));
        case Estimator::MMSE:
            return mmse_->apply(observe_pilots(G, cfg_, rng));
        }
        throw invalid_config("unknown estimator");
    }

private:
    Estimator kind_;
    SystemConfig cfg_;
    std::optional<MmseFilter> mmse_;
};

} // namespace rkamimo

#endif
