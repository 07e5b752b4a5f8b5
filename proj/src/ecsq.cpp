// SPDX-License-Identifier: Apache-2.0

#include "csifb/ecsq.hpp"

#include <cmath>
#include <stdexcept>

#include "csifb/rate_distortion.hpp"

namespace csifb {

namespace {

// R_scalar as a function of the water level.
double scalar_rate_at(const arma::vec& eigvals, double gamma) {
    double bits = 0.0;
    for (arma::uword i = 0; i < eigvals.n_elem; ++i) {
        if (eigvals(i) > gamma) {
            bits += std::log2(eigvals(i) / gamma) + kEcsqOverheadBits;
        }
    }
    return bits;
}

BitAllocation allocation_at(const PosteriorModel& pm, double gamma) {
    BitAllocation alloc;
    alloc.gamma = gamma;
    double excess = 0.0;
    std::vector<double> bits;
    for (arma::uword i = 0; i < pm.eigvals.n_elem; ++i) {
        if (pm.eigvals(i) > gamma) {
            alloc.quantized_set.push_back(static_cast<int>(i));
            bits.push_back(std::log2(pm.eigvals(i) / gamma) + kEcsqOverheadBits);
            excess += gamma;
        } else {
            excess += pm.eigvals(i);
        }
    }
    alloc.per_coeff_bits = arma::vec(bits);
    alloc.total_bits = arma::accu(alloc.per_coeff_bits);
    alloc.target_distortion = pm.d_mmse + excess;
    return alloc;
}

} // namespace

BitAllocation allocate_bits(const PosteriorModel& pm,
                            double target_distortion) {
    const double excess = target_distortion - pm.d_mmse;
    if (excess <= 0.0) {
        throw std::domain_error("allocate_bits: distortion below D_mmse is infeasible");
    }
    const auto wf = waterlevel_from_distortion(pm.eigvals, excess);
    return allocation_at(pm, wf.gamma);
}

BitAllocation budget_to_error(const PosteriorModel& pm, double beta_fb,
                              double c_ul) {
    const double budget = beta_fb * c_ul;
    if (budget <= 0.0) {
        throw std::invalid_argument("budget_to_error: budget must be positive");
    }
    const double lam_max = pm.eigvals.max();

    const double gamma_min = lam_max * 1e-18; // smallest representable excess
    if (budget >= scalar_rate_at(pm.eigvals, gamma_min)) {
        BitAllocation alloc = allocation_at(pm, gamma_min);
        alloc.saturated = true;
        return alloc;
    }

    // R_scalar(gamma) is decreasing in gamma (with 1.508-bit jumps where the
    // active set changes); bisect in log(gamma) and return the feasible side
    // (rate <= budget).
    double lo = std::log(gamma_min);
    double hi = std::log(2.0 * lam_max); // empty set, rate 0
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (scalar_rate_at(pm.eigvals, std::exp(mid)) > budget) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return allocation_at(pm, std::exp(hi));
}

arma::cx_vec ecsq_encode_decode(const arma::cx_vec& kl_coeffs,
                                const BitAllocation& alloc, RngStream& dither,
                                bool use_dither) {
    arma::cx_vec out(kl_coeffs.n_elem, arma::fill::zeros);
    const double step = std::sqrt(6.0 * alloc.gamma);
    for (int idx : alloc.quantized_set) {
        const auto u = static_cast<arma::uword>(idx);
        if (u >= kl_coeffs.n_elem) {
            throw std::invalid_argument("ecsq_encode_decode: allocation/coefficient mismatch");
        }
        double re = kl_coeffs(u).real();
        double im = kl_coeffs(u).imag();
        if (use_dither) {
            const double dre = dither.uniform(-0.5 * step, 0.5 * step);
            const double dim = dither.uniform(-0.5 * step, 0.5 * step);
            re = step * std::round((re + dre) / step) - dre;
            im = step * std::round((im + dim) / step) - dim;
        } else {
            re = step * std::round(re / step);
            im = step * std::round(im / step);
        }
        out(u) = {re, im};
    }
    return out;
}

} // namespace csifb
