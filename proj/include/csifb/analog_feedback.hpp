// SPDX-License-Identifier: Apache-2.0
//
// Analog feedback: power-normalized spreading of the raw training
// observations over the UL, BS-side MMSE estimation and the closed-form
// estimation error. The UE path touches only y_tr and Psi; no covariance
// knowledge is used at the UE.

#pragma once

#include <armadillo>

#include "csifb/channel_model.hpp"
#include "csifb/rng.hpp"
#include "csifb/training.hpp"

namespace csifb {

struct SpreadingMatrix {
    arma::cx_mat psi;  // beta_tr x beta_fb, psi_i = sqrt(a_i) * phi_i
    arma::cx_mat base; // unit-norm direction columns phi_i
    arma::vec scales;  // a_i = M*snr_ul / (phi_i^H Sigma_ytr phi_i)
    double zeta = 0.0; // beta_fb / beta_tr
};

// Directions are columns of one Haar-random unitary, cycled when
// beta_fb > beta_tr; every column satisfies psi^H Sigma_ytr psi = M*snr_ul.
SpreadingMatrix build_spreading_matrix(const arma::cx_mat& sigma_ytr,
                                       int beta_fb, int num_antennas,
                                       double snr_ul, RngStream& rng);

// y_af = y_tr * Psi + noise.
arma::cx_rowvec af_transmit(const arma::cx_rowvec& y_tr,
                            const SpreadingMatrix& psi, RngStream& rng,
                            bool add_noise = true);

// BS MMSE filter for the spread feedback, MN x beta_fb (hhat = F * y_af^H).
arma::cx_mat af_filter(const Covariance& cov, const TrainingMatrix& x,
                       const SpreadingMatrix& psi);

arma::cx_vec af_estimate(const Covariance& cov, const TrainingMatrix& x,
                         const SpreadingMatrix& psi,
                         const arma::cx_rowvec& y_af);

// Analytic estimation error via the reduced r x r form
// Tr(Lambda (I - G + G (I+G)^{-1} G)) with
// G = Lambda^{1/2} U^H X Psi (Psi^H Psi + I)^{-1} Psi^H X^H U Lambda^{1/2}.
double af_error(const Covariance& cov, const TrainingMatrix& x,
                const SpreadingMatrix& psi);

// alpha_af = 1[min(beta_tr, beta_fb) >= r] and the rate-splitting DoF.
double af_exponent(double beta_tr, double beta_fb, int rank);
double af_dof(double alpha, int num_users);

} // namespace csifb
