// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "csifb/ecsq.hpp"
#include "csifb/rate_distortion.hpp"
#include "helpers.hpp"

using namespace csifb;

namespace {

PosteriorModel small_posterior(std::uint64_t seed = 51, double snr = 10.0) {
    const auto cov = testing::make_cov(4, 4, 5, seed);
    auto x = testing::make_training(4, 4, 2, 3, 1.0, seed);
    x.snr_dl = snr;
    return posterior_stats(cov, x);
}

// Minimal posterior with hand-picked eigenvalues and zero floor error.
PosteriorModel synthetic_posterior(const arma::vec& eigvals) {
    PosteriorModel pm;
    pm.eigvals = eigvals;
    pm.d_mmse = 0.0;
    pm.eigvecs = arma::eye<arma::cx_mat>(eigvals.n_elem, eigvals.n_elem);
    return pm;
}

} // namespace

TEST_CASE("bit allocation hand example") {
    const auto pm = synthetic_posterior(arma::vec{4.0, 1.0});
    const auto alloc = allocate_bits(pm, 1.0); // excess 1 -> gamma 0.5
    CHECK(alloc.gamma == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(alloc.quantized_set == std::vector<int>{0, 1});
    CHECK(alloc.per_coeff_bits(0) == doctest::Approx(3.0 + 1.508).epsilon(1e-12));
    CHECK(alloc.per_coeff_bits(1) == doctest::Approx(1.0 + 1.508).epsilon(1e-12));
    CHECK(alloc.total_bits == doctest::Approx(7.016).epsilon(1e-12));
    CHECK(alloc.target_distortion == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("maximal distortion allocates nothing") {
    const auto pm = small_posterior();
    const double total = arma::accu(pm.eigvals);
    const auto alloc = allocate_bits(pm, pm.d_mmse + total);
    CHECK(alloc.quantized_set.empty());
    CHECK(alloc.total_bits == 0.0);
    CHECK_THROWS_AS(allocate_bits(pm, pm.d_mmse), std::domain_error);
}

TEST_CASE("scalar rate exceeds the remote rate by exactly 1.508 per coefficient") {
    const auto pm = small_posterior(52);
    const double total = arma::accu(pm.eigvals);
    for (int i = 1; i < 100; ++i) {
        const double d = pm.d_mmse + total * static_cast<double>(i) / 100.0;
        const auto alloc = allocate_bits(pm, d);
        const double gap = alloc.total_bits - remote_rate(pm, d);
        const double expect =
            kEcsqOverheadBits * static_cast<double>(alloc.quantized_set.size());
        CHECK(std::abs(gap - expect) <= 1e-9 * std::max(1.0, expect));
        for (arma::uword j = 0; j < alloc.per_coeff_bits.n_elem; ++j) {
            CHECK(alloc.per_coeff_bits(j) >= kEcsqOverheadBits - 1e-12);
        }
    }
}

TEST_CASE("budget_to_error inverts the rate allocation") {
    const auto pm = small_posterior(53);
    const double total = arma::accu(pm.eigvals);
    RngStream rng(53, StreamTag::geometry, 77);
    for (int i = 0; i < 25; ++i) {
        // Sample a target distortion, read off its exact scalar rate, then
        // invert that budget; gaps in R_scalar are avoided by construction.
        const double d = pm.d_mmse + total * rng.uniform(1e-4, 0.999);
        const auto fwd = allocate_bits(pm, d);
        if (fwd.total_bits <= 0.0) {
            continue;
        }
        const auto inv = budget_to_error(pm, fwd.total_bits, 1.0);
        CHECK(inv.total_bits == doctest::Approx(fwd.total_bits).epsilon(1e-6));
        CHECK(inv.target_distortion == doctest::Approx(d).epsilon(1e-6));
        CHECK(!inv.saturated);
    }
}

TEST_CASE("budget_to_error saturates on absurd budgets") {
    const auto pm = small_posterior(54);
    const auto alloc = budget_to_error(pm, 1e6, 30.0);
    CHECK(alloc.saturated);
    CHECK(alloc.target_distortion >= pm.d_mmse);
    CHECK_THROWS_AS(budget_to_error(pm, 0.0, 5.0), std::invalid_argument);
}

TEST_CASE("ecsq error never beats the rate-distortion bound") {
    const auto pm = small_posterior(55);
    for (double budget : {2.0, 5.0, 10.0, 25.0, 60.0}) {
        const auto alloc = budget_to_error(pm, budget, 1.0);
        CHECK(alloc.target_distortion >= rd_error_bound(pm, budget, 1.0) - 1e-9);
    }
}

TEST_CASE("quantizing zero without dither returns zero") {
    const auto pm = synthetic_posterior(arma::vec{4.0, 1.0});
    const auto alloc = allocate_bits(pm, 1.0);
    const arma::cx_vec w(2, arma::fill::zeros);
    RngStream dither(1, StreamTag::dither);
    const auto what = ecsq_encode_decode(w, alloc, dither, /*use_dither=*/false);
    CHECK(arma::norm(what) == 0.0);
}

TEST_CASE("dithered quantizer error is gamma per coefficient, input-independent") {
    const auto pm = synthetic_posterior(arma::vec{4.0, 1.0});
    const auto alloc = allocate_bits(pm, 1.0); // gamma = 0.5
    const int n = 100000;

    auto mse_for = [&](auto make_input) {
        arma::vec mse(2, arma::fill::zeros);
        for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(n); ++t) {
            const arma::cx_vec w = make_input(t);
            RngStream dither(9, StreamTag::dither, 0, 0, t);
            const auto what = ecsq_encode_decode(w, alloc, dither);
            for (arma::uword i = 0; i < 2; ++i) {
                mse(i) += std::norm(w(i) - what(i));
            }
        }
        return arma::vec(mse / n);
    };

    const arma::vec gaussian_mse = mse_for([&](std::uint64_t t) {
        RngStream src(10, StreamTag::channel, 0, 0, t);
        arma::cx_vec w(2);
        w(0) = 2.0 * src.cgaussian();
        w(1) = src.cgaussian();
        return w;
    });
    const arma::vec constant_mse = mse_for([&](std::uint64_t) {
        arma::cx_vec w(2);
        w(0) = {0.713, -0.201};
        w(1) = {-1.44, 0.05};
        return w;
    });

    for (arma::uword i = 0; i < 2; ++i) {
        CHECK(gaussian_mse(i) == doctest::Approx(alloc.gamma).epsilon(0.02));
        CHECK(constant_mse(i) == doctest::Approx(alloc.gamma).epsilon(0.02));
    }
}

TEST_CASE("end-to-end pipeline error matches the analytic target") {
    const auto cov = testing::make_cov(3, 4, 4, 56);
    const auto x = testing::make_training(3, 4, 2, 3, 15.0, 56);
    const auto pm = posterior_stats(cov, x);
    const double total = arma::accu(pm.eigvals);
    const auto alloc = allocate_bits(pm, pm.d_mmse + 0.25 * total);

    double err = 0.0;
    double quant_err = 0.0;
    const int n = 10000;
    for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(n); ++t) {
        RngStream ch(56, StreamTag::channel, 0, 0, t);
        RngStream nz(56, StreamTag::training_noise, 0, 0, t);
        RngStream dt(56, StreamTag::dither, 0, 0, t);
        const arma::cx_vec h = sample_channel(cov, ch);
        const arma::cx_vec u = mmse_estimate(pm, observe(h, x, nz));
        const arma::cx_vec w = pm.eigvecs.t() * u;
        const arma::cx_vec what = ecsq_encode_decode(w, alloc, dt);
        err += std::pow(arma::norm(h - pm.eigvecs * what), 2);
        quant_err += std::pow(arma::norm(w - what), 2);
    }
    CHECK(err / n == doctest::Approx(alloc.target_distortion).epsilon(0.05));
    // Orthogonal decomposition: total error = floor + quantization error.
    CHECK(err / n ==
          doctest::Approx(pm.d_mmse + quant_err / n).epsilon(0.05));
}
