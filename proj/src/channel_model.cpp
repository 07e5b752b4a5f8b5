// SPDX-License-Identifier: Apache-2.0

#include "csifb/channel_model.hpp"

#include <cmath>
#include <stdexcept>

namespace csifb {

MultipathGeometry sample_geometry(int num_paths, double tau_max, RngStream& rng,
                                  double d_over_lambda, double delta_f) {
    if (num_paths < 1) {
        throw std::invalid_argument("sample_geometry: need at least one path");
    }
    if (tau_max <= 0.0) {
        throw std::invalid_argument("sample_geometry: tau_max must be positive");
    }
    MultipathGeometry geo;
    geo.d_over_lambda = d_over_lambda;
    geo.delta_f = delta_f;
    geo.paths.reserve(static_cast<std::size_t>(num_paths));
    constexpr double half_pi = 1.5707963267948966192313216916398;
    for (int l = 0; l < num_paths; ++l) {
        PathParam p;
        p.theta = rng.uniform(-half_pi, half_pi);
        p.tau = rng.uniform(0.0, tau_max);
        geo.paths.push_back(p);
    }
    return geo;
}

arma::cx_vec steering_vector(const PathParam& path, int num_antennas,
                             int num_subcarriers, double d_over_lambda,
                             double delta_f) {
    const int dim = num_antennas * num_subcarriers;
    arma::cx_vec a(dim);
    constexpr double pi = 3.1415926535897932384626433832795;
    const double spatial = pi * 2.0 * d_over_lambda * std::sin(path.theta);
    const double temporal = -2.0 * pi * delta_f * path.tau;
    for (int n = 1; n <= num_subcarriers; ++n) {
        const std::complex<double> sub_phase =
            std::polar(1.0, temporal * static_cast<double>(n));
        for (int m = 0; m < num_antennas; ++m) {
            a((n - 1) * num_antennas + m) =
                std::polar(1.0, spatial * static_cast<double>(m)) * sub_phase;
        }
    }
    return a;
}

Covariance covariance_from_geometry(const MultipathGeometry& geo,
                                    int num_antennas, int num_subcarriers) {
    if (geo.paths.empty()) {
        throw std::invalid_argument("covariance_from_geometry: empty geometry");
    }
    const int dim = num_antennas * num_subcarriers;
    const int num_paths = static_cast<int>(geo.paths.size());

    // Sigma = A A^H with A holding the per-path steering vectors scaled by
    // 1/sqrt(L); each steering vector has squared norm M*N, so the trace is
    // exactly M*N.
    arma::cx_mat a_mat(dim, num_paths);
    const double scale = 1.0 / std::sqrt(static_cast<double>(num_paths));
    for (int l = 0; l < num_paths; ++l) {
        a_mat.col(l) = scale * steering_vector(geo.paths[static_cast<std::size_t>(l)],
                                               num_antennas, num_subcarriers,
                                               geo.d_over_lambda, geo.delta_f);
    }

    Covariance cov;
    cov.dim = dim;
    cov.matrix = a_mat * a_mat.t();
    cov.matrix = 0.5 * (cov.matrix + cov.matrix.t());

    // Eigendecomposition through the L x L Gram matrix; never factors the
    // full dim x dim matrix.
    arma::cx_mat gram = a_mat.t() * a_mat;
    gram = 0.5 * (gram + gram.t());
    arma::vec evals;
    arma::cx_mat evecs;
    arma::eig_sym(evals, evecs, gram); // ascending

    const double lambda_max = evals.max();
    const double tol = kCovRankTol * std::max(lambda_max, 0.0);
    std::vector<arma::uword> keep;
    for (arma::uword i = gram.n_rows; i-- > 0;) { // descending order
        if (evals(i) > tol) {
            keep.push_back(i);
        }
    }
    cov.rank = static_cast<int>(keep.size());
    cov.eigvals.set_size(keep.size());
    cov.eigvecs.set_size(dim, keep.size());
    for (std::size_t k = 0; k < keep.size(); ++k) {
        const double lam = evals(keep[k]);
        cov.eigvals(k) = lam;
        cov.eigvecs.col(k) = a_mat * evecs.col(keep[k]) / std::sqrt(lam);
    }
    return cov;
}

arma::cx_vec sample_channel(const Covariance& cov, RngStream& rng) {
    arma::cx_vec h(cov.dim, arma::fill::zeros);
    if (cov.rank == 0) {
        return h;
    }
    arma::cx_vec g(cov.rank);
    for (int i = 0; i < cov.rank; ++i) {
        g(i) = rng.cgaussian() * std::sqrt(cov.eigvals(i));
    }
    h = cov.eigvecs * g;
    return h;
}

} // namespace csifb
