// SPDX-License-Identifier: Apache-2.0
//
// Dense, full-dimension reference implementations used to cross-check the
// reduced-rank production formulas. Deliberately slow and literal.

#pragma once

#include <armadillo>

#include "csifb/analog_feedback.hpp"
#include "csifb/channel_model.hpp"
#include "csifb/training.hpp"

namespace csifb {

// MMSE error from the full MN x MN covariance:
// Tr(Sigma) - Tr(Sigma X (X^H Sigma X + I)^{-1} X^H Sigma).
double dense_mmse_error(const Covariance& cov, const TrainingMatrix& x);

// MMSE filter Sigma X (X^H Sigma X + I)^{-1} applied to y^H, full dimension.
arma::cx_mat dense_mmse_filter(const Covariance& cov, const TrainingMatrix& x);

// Analog-feedback MMSE error from the full covariance of
// y_af = Psi^H (X^H h + z) + z'.
double dense_af_error(const Covariance& cov, const TrainingMatrix& x,
                      const SpreadingMatrix& psi);

// Water level gamma solving sum_i min(gamma, eigvals_i) = excess, found by
// bisection rather than the closed-form prefix scan.
double bisect_waterlevel(const arma::vec& eigvals, double excess);

} // namespace csifb
