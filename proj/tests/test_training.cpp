// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "csifb/training.hpp"
#include "helpers.hpp"

using namespace csifb;

TEST_CASE("pilot pattern placement") {
    CHECK(pilot_pattern(24, 4) == std::vector<int>{1, 7, 13, 19});
    CHECK(pilot_pattern(24, 1) == std::vector<int>{1});
    const auto all = pilot_pattern(24, 24);
    REQUIRE(all.size() == 24);
    for (int i = 0; i < 24; ++i) {
        CHECK(all[static_cast<std::size_t>(i)] == i + 1);
    }
    CHECK_THROWS_AS(pilot_pattern(24, 25), std::invalid_argument);
    CHECK_THROWS_AS(pilot_pattern(24, 0), std::invalid_argument);
}

TEST_CASE("training matrix block sparsity matches the pilot pattern") {
    const int m = 3, n = 8, n_p = 2, t_p = 4;
    const auto x = testing::make_training(m, n, n_p, t_p, 2.5);
    CHECK(x.beta() == t_p * n_p);
    CHECK(x.pattern == pilot_pattern(n, n_p));

    for (int sub = 1; sub <= n; ++sub) {
        const bool is_pilot = std::find(x.pattern.begin(), x.pattern.end(),
                                        sub) != x.pattern.end();
        const arma::cx_mat block = x.base.rows(
            static_cast<arma::uword>((sub - 1) * m),
            static_cast<arma::uword>(sub * m) - 1);
        if (is_pilot) {
            CHECK(arma::norm(block, "fro") > 0.0);
        } else {
            CHECK(arma::norm(block, "fro") == 0.0);
        }
    }
}

TEST_CASE("single-pilot matrix has exactly M nonzero rows") {
    const int m = 5;
    const auto x = testing::make_training(m, 6, 1, 1, 1.0);
    CHECK(x.beta() == 1);
    int nonzero_rows = 0;
    for (arma::uword r = 0; r < x.base.n_rows; ++r) {
        if (arma::norm(x.base.row(r)) > 0.0) {
            ++nonzero_rows;
        }
    }
    CHECK(nonzero_rows == m);
}

TEST_CASE("snr enters as a pure scale of the same base") {
    const auto x1 = testing::make_training(4, 6, 2, 3, 1.0, 21);
    const auto x4 = testing::make_training(4, 6, 2, 3, 4.0, 21);
    CHECK(arma::norm(x4.scaled() - 2.0 * x1.scaled(), "fro") < 1e-12);
}

TEST_CASE("expected squared column norm equals snr") {
    const double snr = 3.0;
    double acc = 0.0;
    long cols = 0;
    for (std::uint64_t i = 0; i < 2000; ++i) {
        RngStream rng(22, StreamTag::training_matrix, i);
        const auto x = build_training_matrix(pilot_pattern(6, 2), 2, 4, 6, snr, rng);
        for (int c = 0; c < x.beta(); ++c) {
            acc += std::pow(arma::norm(x.scaled().col(c)), 2);
            ++cols;
        }
    }
    CHECK(acc / static_cast<double>(cols) == doctest::Approx(snr).epsilon(0.02));
}

TEST_CASE("observe: zero channel gives unit-power noise") {
    const auto x = testing::make_training(4, 6, 2, 3, 10.0);
    const arma::cx_vec h(24, arma::fill::zeros);
    double power = 0.0;
    long count = 0;
    for (std::uint64_t t = 0; t < 5000; ++t) {
        RngStream rng(23, StreamTag::training_noise, 0, 0, t);
        const auto y = observe(h, x, rng);
        power += std::pow(arma::norm(y), 2);
        count += y.n_elem;
    }
    CHECK(power / static_cast<double>(count) == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("observe without noise is the exact linear map") {
    const auto x = testing::make_training(4, 6, 2, 3, 9.0);
    arma::cx_vec h(24, arma::fill::zeros);
    h(0) = 1.0;
    RngStream rng(24, StreamTag::training_noise);
    const auto y = observe(h, x, rng, /*add_noise=*/false);
    CHECK(arma::norm(y - x.scaled().row(0)) < 1e-12);

    arma::cx_vec wrong(10, arma::fill::zeros);
    CHECK_THROWS_AS(observe(wrong, x, rng), std::invalid_argument);
}

TEST_CASE("observation second moment matches the covariance identity") {
    const auto cov = testing::make_cov(3, 4, 4, 25);
    const auto x = testing::make_training(3, 4, 2, 3, 5.0, 25);
    const arma::cx_mat xs = x.scaled();
    const double expected =
        std::real(arma::trace(xs.t() * cov.matrix * xs)) +
        static_cast<double>(x.beta());
    double acc = 0.0;
    const int n = 10000;
    for (std::uint64_t t = 0; t < static_cast<std::uint64_t>(n); ++t) {
        RngStream ch(25, StreamTag::channel, 0, 0, t);
        RngStream nz(25, StreamTag::training_noise, 0, 0, t);
        const auto y = observe(sample_channel(cov, ch), x, nz);
        acc += std::pow(arma::norm(y), 2);
    }
    CHECK(acc / n == doctest::Approx(expected).epsilon(0.03));
}

TEST_CASE("training_covariance equals the dense formula") {
    const auto cov = testing::make_cov(3, 4, 4, 26);
    const auto x = testing::make_training(3, 4, 2, 3, 5.0, 26);
    const arma::cx_mat xs = x.scaled();
    arma::cx_mat dense = xs.t() * cov.matrix * xs;
    dense.diag() += 1.0;
    const arma::cx_mat reduced = training_covariance(cov, x);
    CHECK(arma::norm(dense - reduced, "fro") / arma::norm(dense, "fro") < 1e-10);
}
