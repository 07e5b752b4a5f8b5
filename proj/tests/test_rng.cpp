// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "csifb/rng.hpp"

using namespace csifb;

TEST_CASE("identical stream coordinates reproduce the same draws") {
    RngStream a(42, StreamTag::channel, 3, 7, 11);
    RngStream b(42, StreamTag::channel, 3, 7, 11);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.uniform() == b.uniform());
    }
}

TEST_CASE("any coordinate change yields a different substream") {
    RngStream base(42, StreamTag::channel, 3, 7, 11);
    RngStream tag(42, StreamTag::dither, 3, 7, 11);
    RngStream seed(43, StreamTag::channel, 3, 7, 11);
    RngStream idx(42, StreamTag::channel, 3, 7, 12);
    const double x = base.uniform();
    CHECK(x != tag.uniform());
    CHECK(x != seed.uniform());
    CHECK(x != idx.uniform());
}

TEST_CASE("uniform range and moments") {
    RngStream rng(1, StreamTag::geometry);
    double sum = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("gaussian moments") {
    RngStream rng(2, StreamTag::geometry);
    double sum = 0.0, sumsq = 0.0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const double g = rng.gaussian();
        sum += g;
        sumsq += g * g;
    }
    CHECK(std::abs(sum / n) < 0.02);
    CHECK(sumsq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("complex gaussian has unit second moment and circular symmetry") {
    RngStream rng(3, StreamTag::geometry);
    double power = 0.0, re = 0.0, im = 0.0;
    std::complex<double> pseudo(0.0, 0.0); // E[z^2] should vanish
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        const auto z = rng.cgaussian();
        power += std::norm(z);
        re += z.real();
        im += z.imag();
        pseudo += z * z;
    }
    CHECK(power / n == doctest::Approx(1.0).epsilon(0.02));
    CHECK(std::abs(re / n) < 0.02);
    CHECK(std::abs(im / n) < 0.02);
    CHECK(std::abs(pseudo) / n < 0.02);
}
