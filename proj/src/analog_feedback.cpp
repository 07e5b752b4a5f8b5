// SPDX-License-Identifier: Apache-2.0

#include "csifb/analog_feedback.hpp"

#include <cmath>
#include <stdexcept>

namespace csifb {

SpreadingMatrix build_spreading_matrix(const arma::cx_mat& sigma_ytr,
                                       int beta_fb, int num_antennas,
                                       double snr_ul, RngStream& rng) {
    if (beta_fb < 1) {
        throw std::invalid_argument("build_spreading_matrix: beta_fb must be >= 1");
    }
    const int beta_tr = static_cast<int>(sigma_ytr.n_rows);

    // Haar-random unitary: QR of a complex Gaussian matrix with the usual
    // phase fix on the diagonal of R.
    arma::cx_mat z(beta_tr, beta_tr);
    for (arma::uword j = 0; j < z.n_cols; ++j) {
        for (arma::uword i = 0; i < z.n_rows; ++i) {
            z(i, j) = rng.cgaussian();
        }
    }
    arma::cx_mat q, rr;
    arma::qr(q, rr, z);
    for (int j = 0; j < beta_tr; ++j) {
        const std::complex<double> d = rr(j, j);
        if (std::abs(d) > 0.0) {
            q.col(j) *= d / std::abs(d);
        }
    }

    SpreadingMatrix sm;
    sm.zeta = static_cast<double>(beta_fb) / static_cast<double>(beta_tr);
    sm.base.set_size(beta_tr, beta_fb);
    sm.scales.set_size(beta_fb);
    sm.psi.set_size(beta_tr, beta_fb);
    const double power = static_cast<double>(num_antennas) * snr_ul;
    for (int i = 0; i < beta_fb; ++i) {
        const arma::cx_vec phi = q.col(static_cast<arma::uword>(i % beta_tr));
        const double load = arma::as_scalar(arma::real(phi.t() * sigma_ytr * phi));
        sm.base.col(i) = phi;
        sm.scales(i) = power / load;
        sm.psi.col(i) = std::sqrt(sm.scales(i)) * phi;
    }
    return sm;
}

arma::cx_rowvec af_transmit(const arma::cx_rowvec& y_tr,
                            const SpreadingMatrix& psi, RngStream& rng,
                            bool add_noise) {
    if (y_tr.n_elem != psi.psi.n_rows) {
        throw std::invalid_argument("af_transmit: dimension mismatch");
    }
    arma::cx_rowvec y_af = y_tr * psi.psi;
    if (add_noise) {
        for (arma::uword i = 0; i < y_af.n_elem; ++i) {
            y_af(i) += rng.cgaussian();
        }
    }
    return y_af;
}

arma::cx_mat af_filter(const Covariance& cov, const TrainingMatrix& x,
                       const SpreadingMatrix& psi) {
    // hhat = Sigma^h X Psi (Psi^H Sigma_ytr Psi + I)^{-1} y_af^H, with
    // Sigma^h X = U Lambda B assembled in the rank-r eigenbasis.
    const arma::cx_mat b = cov.eigvecs.t() * x.scaled(); // r x beta_tr
    const arma::cx_mat sigma_ytr = training_covariance(cov, x);
    arma::cx_mat sigma_yaf = psi.psi.t() * sigma_ytr * psi.psi;
    sigma_yaf.diag() += 1.0;
    sigma_yaf = 0.5 * (sigma_yaf + sigma_yaf.t());

    const arma::cx_mat core =
        arma::diagmat(cov.eigvals) * b * psi.psi * arma::inv_sympd(sigma_yaf);
    return cov.eigvecs * core;
}

arma::cx_vec af_estimate(const Covariance& cov, const TrainingMatrix& x,
                         const SpreadingMatrix& psi,
                         const arma::cx_rowvec& y_af) {
    if (y_af.n_elem != psi.psi.n_cols) {
        throw std::invalid_argument("af_estimate: dimension mismatch");
    }
    return af_filter(cov, x, psi) * y_af.t();
}

double af_error(const Covariance& cov, const TrainingMatrix& x,
                const SpreadingMatrix& psi) {
    const arma::cx_mat b = cov.eigvecs.t() * x.scaled(); // r x beta_tr
    arma::cx_mat inner = psi.psi.t() * psi.psi;
    inner.diag() += 1.0;
    inner = 0.5 * (inner + inner.t());

    const arma::cx_mat bp = b * psi.psi; // r x beta_fb
    const arma::vec sqrt_lam = arma::sqrt(cov.eigvals);
    arma::cx_mat g = arma::diagmat(sqrt_lam) *
                     (bp * arma::solve(inner, bp.t())) * arma::diagmat(sqrt_lam);
    g = 0.5 * (g + g.t());

    arma::cx_mat i_plus_g = g;
    i_plus_g.diag() += 1.0;
    const arma::cx_mat inv_ig = arma::inv_sympd(i_plus_g);
    arma::cx_mat reduced = -g + g * inv_ig * g;
    reduced.diag() += 1.0;
    return std::real(arma::trace(arma::diagmat(cov.eigvals) * reduced));
}

double af_exponent(double beta_tr, double beta_fb, int rank) {
    if (rank < 1 || beta_tr < 0.0 || beta_fb < 0.0) {
        throw std::invalid_argument("af_exponent: invalid arguments");
    }
    return std::min(beta_tr, beta_fb) >= static_cast<double>(rank) ? 1.0 : 0.0;
}

double af_dof(double alpha, int num_users) {
    if (alpha < 0.0 || alpha > 1.0 || num_users < 1) {
        throw std::invalid_argument("af_dof: invalid arguments");
    }
    return 1.0 + alpha * static_cast<double>(num_users - 1);
}

} // namespace csifb
