// SPDX-License-Identifier: Apache-2.0

#include "csifb/estimation.hpp"

#include <stdexcept>

namespace csifb {

PosteriorModel posterior_stats(const Covariance& cov, const TrainingMatrix& x) {
    if (cov.rank < 1) {
        throw std::invalid_argument("posterior_stats: covariance rank must be >= 1");
    }
    const int r = cov.rank;
    const arma::cx_mat b = cov.eigvecs.t() * x.scaled();           // r x beta
    const arma::vec sqrt_lam = arma::sqrt(cov.eigvals);
    const arma::cx_mat c = arma::diagmat(sqrt_lam) * b;            // r x beta

    PosteriorModel pm;
    pm.g_core = c * c.t();
    pm.g_core = 0.5 * (pm.g_core + pm.g_core.t());

    arma::cx_mat i_plus_g = pm.g_core;
    i_plus_g.diag() += 1.0;
    const arma::cx_mat inv_ig = arma::inv_sympd(i_plus_g);

    // D_mmse = Tr(Lambda (I - G + G (I+G)^{-1} G)) = Tr(Lambda (I+G)^{-1}).
    pm.d_mmse = std::real(arma::trace(arma::diagmat(cov.eigvals) * inv_ig));

    // Sigma^u core in the channel eigenbasis:
    // K = Lambda^{1/2} G (I+G)^{-1} Lambda^{1/2}.
    arma::cx_mat k_core = arma::diagmat(sqrt_lam) * (pm.g_core * inv_ig) *
                          arma::diagmat(sqrt_lam);
    k_core = 0.5 * (k_core + k_core.t());

    arma::vec evals;
    arma::cx_mat evecs;
    arma::eig_sym(evals, evecs, k_core); // ascending

    pm.eigvals.set_size(r);
    pm.eigvecs.set_size(cov.dim, r);
    const double lam_max = std::max(evals.max(), 0.0);
    for (int i = 0; i < r; ++i) {
        double lam = evals(r - 1 - i);
        if (lam < kPosteriorEigTol * lam_max) {
            lam = 0.0;
        }
        pm.eigvals(i) = lam;
        pm.eigvecs.col(i) = cov.eigvecs * evecs.col(r - 1 - i);
    }

    // W = U Lambda^{1/2} (I+G)^{-1} C.
    pm.filter = cov.eigvecs * (arma::diagmat(sqrt_lam) * (inv_ig * c));
    return pm;
}

arma::cx_vec mmse_estimate(const PosteriorModel& pm,
                           const arma::cx_rowvec& y_tr) {
    if (y_tr.n_elem != pm.filter.n_cols) {
        throw std::invalid_argument("mmse_estimate: observation dimension mismatch");
    }
    return pm.filter * y_tr.t();
}

} // namespace csifb
