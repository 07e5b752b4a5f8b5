// SPDX-License-Identifier: Apache-2.0
//
// Pilot pattern, block-sparse training matrix and UE training observations.

#pragma once

#include <armadillo>
#include <vector>

#include "csifb/channel_model.hpp"
#include "csifb/rng.hpp"

namespace csifb {

// Training matrix stored as unit-power base times sqrt(snr_dl). Rows outside
// the pilot subcarrier blocks are identically zero; nonzero entries of the
// base are i.i.d. CN(0, 1/M) so the scaled matrix has entries CN(0, snr/M)
// and expected squared column norm snr_dl.
struct TrainingMatrix {
    std::vector<int> pattern;       // pilot subcarrier indices, 1-based
    int pilots_per_subcarrier = 0;  // T_p
    arma::cx_mat base;              // MN x beta_tr
    double snr_dl = 1.0;

    int beta() const { return static_cast<int>(base.n_cols); }
    arma::cx_mat scaled() const { return std::sqrt(snr_dl) * base; }
};

// Uniformly spaced pilot subcarriers: {1, 1+floor(N/N_p), ...}, 1-based.
std::vector<int> pilot_pattern(int num_subcarriers, int num_pilot_subcarriers);

TrainingMatrix build_training_matrix(const std::vector<int>& pattern,
                                     int pilots_per_subcarrier,
                                     int num_antennas, int num_subcarriers,
                                     double snr_dl, RngStream& rng);

// y = h^H X^tr + z with unit-variance complex Gaussian noise. add_noise=false
// is a test hook; production paths always add noise.
arma::cx_rowvec observe(const arma::cx_vec& h, const TrainingMatrix& x,
                        RngStream& rng, bool add_noise = true);

// Covariance of the training observation, X^H Sigma^h X + I, assembled in the
// rank-r channel eigenbasis.
arma::cx_mat training_covariance(const Covariance& cov,
                                 const TrainingMatrix& x);

} // namespace csifb
