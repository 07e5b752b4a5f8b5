// SPDX-License-Identifier: Apache-2.0

#include "csifb/rate_distortion.hpp"

#include <cmath>
#include <stdexcept>

namespace csifb {

WaterfillSolution waterlevel_from_distortion(const arma::vec& eigvals,
                                             double excess) {
    if (excess <= 0.0) {
        throw std::invalid_argument(
            "waterlevel_from_distortion: excess must be positive");
    }
    const int n = static_cast<int>(eigvals.n_elem);
    const double total = arma::accu(eigvals);

    WaterfillSolution sol;
    if (excess >= total * (1.0 - 1e-15)) {
        sol.gamma = eigvals.max();
        sol.active_count = 0;
        sol.rate_bits = 0.0;
        sol.distortion_excess = total;
        sol.clamped = excess > total * (1.0 + 1e-12);
        return sol;
    }

    // Suffix sums: suffix[k] = sum of eigvals[k..n-1].
    arma::vec suffix(static_cast<arma::uword>(n) + 1, arma::fill::zeros);
    for (int i = n - 1; i >= 0; --i) {
        suffix(i) = suffix(i + 1) + eigvals(i);
    }

    double gamma = eigvals(0);
    for (int k = 1; k <= n; ++k) {
        const double cand = (excess - suffix(k)) / static_cast<double>(k);
        const double lower = (k < n) ? eigvals(k) : 0.0;
        if (cand >= lower && cand <= eigvals(k - 1)) {
            gamma = cand;
            break;
        }
    }

    sol.gamma = gamma;
    double rate = 0.0;
    double attained = 0.0;
    int active = 0;
    for (int i = 0; i < n; ++i) {
        if (eigvals(i) > gamma) {
            rate += std::log2(eigvals(i) / gamma);
            attained += gamma;
            ++active;
        } else {
            attained += eigvals(i);
        }
    }
    sol.active_count = active;
    sol.rate_bits = rate;
    sol.distortion_excess = attained;
    return sol;
}

double remote_rate(const PosteriorModel& pm, double distortion) {
    const double excess = distortion - pm.d_mmse;
    if (excess <= 0.0) {
        throw std::domain_error(
            "remote_rate: distortion below D_mmse is infeasible");
    }
    return waterlevel_from_distortion(pm.eigvals, excess).rate_bits;
}

double remote_distortion(const PosteriorModel& pm, double rate_bits) {
    if (rate_bits < 0.0) {
        throw std::invalid_argument("remote_distortion: rate must be >= 0");
    }
    const double total = arma::accu(pm.eigvals);
    if (rate_bits == 0.0) {
        return pm.d_mmse + total;
    }

    // Positive eigenvalues only; zeros never enter the active set.
    int npos = 0;
    while (npos < static_cast<int>(pm.eigvals.n_elem) && pm.eigvals(npos) > 0.0) {
        ++npos;
    }
    arma::vec suffix(static_cast<arma::uword>(npos) + 1, arma::fill::zeros);
    for (int i = npos - 1; i >= 0; --i) {
        suffix(i) = suffix(i + 1) + pm.eigvals(i);
    }

    // Segment with k active coefficients: R = sum_{i<k} log2(lambda_i) -
    // k*log2(gamma), so gamma is closed form per segment.
    double log_sum = 0.0;
    for (int k = 1; k <= npos; ++k) {
        log_sum += std::log2(pm.eigvals(k - 1));
        const double gamma =
            std::exp2((log_sum - rate_bits) / static_cast<double>(k));
        const double lower = (k < npos) ? pm.eigvals(k) : 0.0;
        if (gamma >= lower || k == npos) {
            return pm.d_mmse + static_cast<double>(k) * gamma + suffix(k);
        }
    }
    return pm.d_mmse; // unreachable for npos >= 1
}

double feedback_capacity(double snr_dl, double kappa, int num_antennas) {
    if (snr_dl <= 0.0 || kappa <= 0.0) {
        throw std::invalid_argument("feedback_capacity: snr and kappa must be positive");
    }
    return std::log2(1.0 + static_cast<double>(num_antennas) * kappa * snr_dl);
}

double rd_error_bound(const PosteriorModel& pm, double beta_fb, double c_ul) {
    if (beta_fb < 0.0) {
        throw std::invalid_argument("rd_error_bound: beta_fb must be >= 0");
    }
    return remote_distortion(pm, beta_fb * c_ul);
}

double rd_exponent(double beta_tr, double beta_fb, int rank) {
    if (rank < 1 || beta_tr < 0.0 || beta_fb < 0.0) {
        throw std::invalid_argument("rd_exponent: invalid arguments");
    }
    if (beta_tr < static_cast<double>(rank)) {
        return 0.0;
    }
    return std::min(beta_fb / static_cast<double>(rank), 1.0);
}

double rd_dof(double alpha, int num_users) {
    if (alpha < 0.0 || alpha > 1.0 || num_users < 1) {
        throw std::invalid_argument("rd_dof: invalid arguments");
    }
    return 1.0 + alpha * static_cast<double>(num_users - 1);
}

} // namespace csifb
