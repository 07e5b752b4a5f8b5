// SPDX-License-Identifier: Apache-2.0
//
// UE-side MMSE estimation statistics: posterior covariance eigensystem, the
// MMSE filter and the irreducible estimation error D_mmse. All heavy algebra
// runs in the rank-r channel eigenbasis.

#pragma once

#include <armadillo>

#include "csifb/channel_model.hpp"
#include "csifb/training.hpp"

namespace csifb {

struct PosteriorModel {
    arma::cx_mat filter;  // MN x beta_tr, u = filter * y^H
    arma::cx_mat eigvecs; // MN x r, eigenvectors of Sigma^u (g_l)
    arma::vec eigvals;    // lambda^u, descending; dust clamped to exact zero
    double d_mmse = 0.0;
    arma::cx_mat g_core;  // cached r x r G = Lambda^{1/2} U^H X X^H U Lambda^{1/2}
};

// Eigenvalues of Sigma^u below this times the largest are clamped to zero so
// downstream water-filling never log-diverges on numerical dust.
inline constexpr double kPosteriorEigTol = 1e-12;

PosteriorModel posterior_stats(const Covariance& cov, const TrainingMatrix& x);

arma::cx_vec mmse_estimate(const PosteriorModel& pm, const arma::cx_rowvec& y_tr);

} // namespace csifb
