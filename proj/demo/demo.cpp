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


// Minimal end-to-end use of the library: one drop, LS estimates, and the
// Kaczmarz combiner approaching the canonical RZF combiner as the iteration
// budget grows.

#include "rkamimo/analysis.hpp"
#include "rkamimo/complexity.hpp"

#include <cstdio>

int main()
{
    using namespace rkamimo;
    SystemConfig sys; // reference-scenario defaults: M = 100, K = 10
    const Scenario sc{sys, Estimator::LS, Correlation::Correlated};
    const CovarianceSet cov = make_drop(sys, sc.correlation, /*seed=*/7, /*drop=*/0);

    Rng rng(7);
    const ChannelEstimate est = ChannelEstimator(Estimator::LS, cov, sys)(ChannelSampler(cov).sample(rng), rng);
    const double xi = sys.regularization();
    const GainReport g = average_gain(est.Ghat, xi);
    std::printf("M=%ld K=%ld xi=%.4g kappa=%.4g\n", static_cast<long>(sys.M), static_cast<long>(sys.K), xi,
                g.kappa_closed);

    const Combiner rzf = rzf_combiner(est.Ghat, xi);
    for (Index T : {1, 10, 100, 1000}) {
        RkaOptions o;
        o.iterations = T;
        o.xi = xi;
        const Combiner c = rka_parl(est.Ghat, o, 7);
        std::printf("T=%5ld  ||V_rka - V_rzf|| / ||V_rzf|| = %.3e\n", static_cast<long>(T),
                    (c.V - rzf.V).norm() / rzf.V.norm());
    }

    // SE over a few realizations of the same drop.
    const auto factory = [&](const ChannelEstimate& e) {
        RkaOptions o;
        o.iterations = 200;
        o.xi = xi;
        return rka_parl(e.Ghat, o, 11);
    };
    const SeEstimate se = sinr_se_montecarlo(sc, cov, factory, 50, 7);
    std::printf("rKA (T=200) average SE per UE: %.3f bit/s/Hz\n", se.mean_se());
    std::printf("RZF upper bound on worthwhile iterations at M=200, K=100: %.1f\n",
                t_upper(200, 100, Scheme::RZF));
    return 0;
}
