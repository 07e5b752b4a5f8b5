// SPDX-License-Identifier: Apache-2.0

#include "csifb/oracles.hpp"

#include <stdexcept>

namespace csifb {

double dense_mmse_error(const Covariance& cov, const TrainingMatrix& x) {
    const arma::cx_mat xs = x.scaled(); // MN x beta
    arma::cx_mat sigma_y = xs.t() * cov.matrix * xs;
    sigma_y.diag() += 1.0;
    const arma::cx_mat cross = cov.matrix * xs; // MN x beta
    const double recovered = std::real(
        arma::trace(cross * arma::solve(sigma_y, cross.t())));
    return std::real(arma::trace(cov.matrix)) - recovered;
}

arma::cx_mat dense_mmse_filter(const Covariance& cov, const TrainingMatrix& x) {
    const arma::cx_mat xs = x.scaled();
    arma::cx_mat sigma_y = xs.t() * cov.matrix * xs;
    sigma_y.diag() += 1.0;
    return cov.matrix * xs * arma::inv(sigma_y);
}

double dense_af_error(const Covariance& cov, const TrainingMatrix& x,
                      const SpreadingMatrix& psi) {
    const arma::cx_mat xs = x.scaled();
    const arma::cx_mat p = psi.psi;
    // Sigma_yaf = Psi^H (X^H Sigma X + I) Psi + I.
    arma::cx_mat sigma_yaf = p.t() * (xs.t() * cov.matrix * xs) * p + p.t() * p;
    sigma_yaf.diag() += 1.0;
    const arma::cx_mat cross = cov.matrix * xs * p; // MN x beta_fb
    const double recovered = std::real(
        arma::trace(cross * arma::solve(sigma_yaf, cross.t())));
    return std::real(arma::trace(cov.matrix)) - recovered;
}

double bisect_waterlevel(const arma::vec& eigvals, double excess) {
    if (excess <= 0.0) {
        throw std::invalid_argument("bisect_waterlevel: excess must be positive");
    }
    const double total = arma::accu(eigvals);
    if (excess >= total) {
        throw std::invalid_argument("bisect_waterlevel: excess exceeds trace");
    }
    auto filled = [&](double gamma) {
        double s = 0.0;
        for (arma::uword i = 0; i < eigvals.n_elem; ++i) {
            s += std::min(gamma, eigvals(i));
        }
        return s;
    };
    double lo = 0.0;
    double hi = eigvals.max();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (filled(mid) < excess) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace csifb
