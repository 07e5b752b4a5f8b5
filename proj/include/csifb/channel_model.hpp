// SPDX-License-Identifier: Apache-2.0
//
// Multipath geometries, the derived channel covariance, and block-fading
// channel realizations.

#pragma once

#include <armadillo>
#include <vector>

#include "csifb/rng.hpp"

namespace csifb {

struct PathParam {
    double theta; // angle of arrival, radians in [-pi/2, pi/2]
    double tau;   // path delay, seconds in [0, tau_max]
};

struct MultipathGeometry {
    std::vector<PathParam> paths;
    double d_over_lambda = 0.5; // antenna spacing over wavelength
    double delta_f = 15e3;      // subcarrier spacing, Hz
};

// Channel covariance with its eigendecomposition computed once and cached.
// Invariants: Hermitian PSD, trace = M*N, matrix == eigvecs * diag(eigvals)
// * eigvecs^H, eigvals sorted descending, rank = #eigvals above tolerance.
struct Covariance {
    int dim = 0;          // M*N
    arma::cx_mat matrix;  // dim x dim, Hermitian PSD
    arma::cx_mat eigvecs; // dim x rank, column-unitary
    arma::vec eigvals;    // rank positive values, descending
    int rank = 0;
};

// Eigenvalue below rank_tol * lambda_max counts as numerically zero.
inline constexpr double kCovRankTol = 1e-10;

MultipathGeometry sample_geometry(int num_paths, double tau_max, RngStream& rng,
                                  double d_over_lambda = 0.5,
                                  double delta_f = 15e3);

// Per-path array/frequency response, length M*N, laid out as N
// subcarrier-blocks of M antenna entries. Element for antenna m (0-based) on
// subcarrier n (1-based) is exp(j*pi*m*2*(d/lambda)*sin(theta)) *
// exp(-j*2*pi*n*delta_f*tau). All entries have unit modulus.
arma::cx_vec steering_vector(const PathParam& path, int num_antennas,
                             int num_subcarriers, double d_over_lambda,
                             double delta_f);

// Sum of per-path outer products with unit-variance complex path gains,
// trace-normalized to M*N.
Covariance covariance_from_geometry(const MultipathGeometry& geo,
                                    int num_antennas, int num_subcarriers);

// h = U diag(sqrt(lambda)) g with g standard complex Gaussian of length rank.
arma::cx_vec sample_channel(const Covariance& cov, RngStream& rng);

} // namespace csifb
