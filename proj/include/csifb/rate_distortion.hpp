// SPDX-License-Identifier: Apache-2.0
//
// Remote rate-distortion function of the channel given noisy training
// observations, its inverse, the feedback-capacity error bound and the
// closed-form quality scaling exponent. All rates are in bits (log base 2).

#pragma once

#include <armadillo>

#include "csifb/estimation.hpp"

namespace csifb {

// Reverse water-filling state for a fixed excess distortion D - D_mmse.
struct WaterfillSolution {
    double gamma = 0.0;            // water level
    int active_count = 0;          // eigenvalues strictly above gamma
    double rate_bits = 0.0;        // sum over active of log2(lambda/gamma)
    double distortion_excess = 0.0; // sum of min(gamma, lambda)
    bool clamped = false;          // excess exceeded sum(lambda)
};

// Closed-form scan over the sorted eigenvalues; gamma is piecewise linear in
// the excess, no iterative solve. eigvals must be sorted descending.
WaterfillSolution waterlevel_from_distortion(const arma::vec& eigvals,
                                             double excess);

// R_h^r(D), bits. Throws for D < D_mmse (infeasible distortion).
double remote_rate(const PosteriorModel& pm, double distortion);

// D_h^r(R), exact inverse of remote_rate; closed-form per active-set segment.
double remote_distortion(const PosteriorModel& pm, double rate_bits);

// High-SNR UL MIMO-MAC capacity, log2(1 + M * kappa * snr_dl) bits/use.
double feedback_capacity(double snr_dl, double kappa, int num_antennas);

// Analytic error bound D_h^r(beta_fb * C_ul) for the rate-distortion strategy.
double rd_error_bound(const PosteriorModel& pm, double beta_fb, double c_ul);

// Closed-form scaling: alpha_rd = min(beta_fb/r, 1) * 1[beta_tr >= r]
// and the resulting rate-splitting DoF 1 + alpha * (K - 1).
double rd_exponent(double beta_tr, double beta_fb, int rank);
double rd_dof(double alpha, int num_users);

} // namespace csifb
