// SPDX-License-Identifier: Apache-2.0

#include "csifb/training.hpp"

#include <cmath>
#include <stdexcept>

namespace csifb {

std::vector<int> pilot_pattern(int num_subcarriers, int num_pilot_subcarriers) {
    if (num_pilot_subcarriers < 1 || num_pilot_subcarriers > num_subcarriers) {
        throw std::invalid_argument("pilot_pattern: need 1 <= N_p <= N");
    }
    const int spacing = num_subcarriers / num_pilot_subcarriers;
    std::vector<int> pattern(static_cast<std::size_t>(num_pilot_subcarriers));
    for (int i = 0; i < num_pilot_subcarriers; ++i) {
        pattern[static_cast<std::size_t>(i)] = 1 + i * spacing;
    }
    return pattern;
}

TrainingMatrix build_training_matrix(const std::vector<int>& pattern,
                                     int pilots_per_subcarrier,
                                     int num_antennas, int num_subcarriers,
                                     double snr_dl, RngStream& rng) {
    if (pilots_per_subcarrier < 1) {
        throw std::invalid_argument("build_training_matrix: T_p must be >= 1");
    }
    const int dim = num_antennas * num_subcarriers;
    const int beta = pilots_per_subcarrier * static_cast<int>(pattern.size());

    TrainingMatrix x;
    x.pattern = pattern;
    x.pilots_per_subcarrier = pilots_per_subcarrier;
    x.snr_dl = snr_dl;
    x.base.zeros(dim, beta);

    const double sigma = 1.0 / std::sqrt(static_cast<double>(num_antennas));
    int col = 0;
    for (int sub : pattern) {
        const int row0 = (sub - 1) * num_antennas;
        for (int i = 0; i < pilots_per_subcarrier; ++i, ++col) {
            for (int m = 0; m < num_antennas; ++m) {
                x.base(row0 + m, col) = sigma * rng.cgaussian();
            }
        }
    }
    return x;
}

arma::cx_rowvec observe(const arma::cx_vec& h, const TrainingMatrix& x,
                        RngStream& rng, bool add_noise) {
    if (h.n_elem != x.base.n_rows) {
        throw std::invalid_argument("observe: channel/training dimension mismatch");
    }
    arma::cx_rowvec y = std::sqrt(x.snr_dl) * (h.t() * x.base);
    if (add_noise) {
        for (arma::uword i = 0; i < y.n_elem; ++i) {
            y(i) += rng.cgaussian();
        }
    }
    return y;
}

arma::cx_mat training_covariance(const Covariance& cov,
                                 const TrainingMatrix& x) {
    // X^H Sigma X + I = C^H C + I with C = Lambda^{1/2} U^H X (r x beta).
    const arma::cx_mat b = cov.eigvecs.t() * x.scaled();
    const arma::cx_mat c = arma::diagmat(arma::sqrt(cov.eigvals)) * b;
    arma::cx_mat sigma_y = c.t() * c;
    sigma_y.diag() += 1.0;
    return 0.5 * (sigma_y + sigma_y.t());
}

} // namespace csifb
