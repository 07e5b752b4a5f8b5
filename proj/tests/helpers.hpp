// SPDX-License-Identifier: Apache-2.0
//
// Shared fixtures for the unit tests: small random covariances and training
// matrices with deterministic seeds.

#pragma once

#include "csifb/channel_model.hpp"
#include "csifb/training.hpp"

namespace csifb::testing {

inline Covariance make_cov(int m, int n, int l, std::uint64_t seed = 1,
                           std::uint64_t idx = 0) {
    RngStream rng(seed, StreamTag::geometry, idx, 0);
    const auto geo = sample_geometry(l, 1.0 / (15e3 * n), rng);
    return covariance_from_geometry(geo, m, n);
}

inline TrainingMatrix make_training(int m, int n, int n_p, int t_p, double snr,
                                    std::uint64_t seed = 1,
                                    std::uint64_t idx = 0) {
    RngStream rng(seed, StreamTag::training_matrix, idx);
    return build_training_matrix(pilot_pattern(n, n_p), t_p, m, n, snr, rng);
}

// All-zero training matrix with the right shape: the "no information" hook.
inline TrainingMatrix zero_training(int m, int n, int n_p, int t_p) {
    TrainingMatrix x = make_training(m, n, n_p, t_p, 1.0);
    x.base.zeros();
    return x;
}

} // namespace csifb::testing
