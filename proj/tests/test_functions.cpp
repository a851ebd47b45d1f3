#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "nnlif/functions.hpp"
#include "nnlif/model.hpp"

using namespace nnlif;
using Catch::Approx;

TEST_CASE("Hermite functions at the origin") {
    const double c = std::pow(std::numbers::pi, -0.25);
    CHECK(hermite(0, 0.0) == Approx(0.751125544464943));
    CHECK(hermite(0, 0.0) == Approx(c));
    CHECK(hermite(1, 0.0) == 0.0);
    CHECK(hermite(2, 0.0) == Approx(-c / std::numbers::sqrt2));
    CHECK(hermite(2, 0.0) == Approx(-0.531125966013598));
}

TEST_CASE("Hermite functions against explicit polynomials") {
    // psi_n(y) = H_n(y) e^{-y^2/2} / sqrt(2^n n! sqrt(pi)) with physicists' H_n
    const auto explicit_psi = [](int n, double y) {
        const double Hn[] = {1.0, 2.0 * y, 4.0 * y * y - 2.0, 8.0 * y * y * y - 12.0 * y,
                             16.0 * std::pow(y, 4) - 48.0 * y * y + 12.0};
        const double norm = std::sqrt(std::pow(2.0, n) * std::tgamma(n + 1.0) * std::sqrt(std::numbers::pi));
        return Hn[n] * std::exp(-0.5 * y * y) / norm;
    };
    for (int n = 0; n <= 4; ++n) {
        for (double y : {-2.5, -1.0, -0.3, 0.0, 0.7, 1.9}) {
            CHECK(hermite(n, y) == Approx(explicit_psi(n, y)).margin(1e-14));
        }
    }
}

TEST_CASE("Hermite functions are orthonormal") {
    const double h = 1e-3;
    for (int m = 0; m <= 4; ++m) {
        for (int n = 0; n <= 4; ++n) {
            double s = 0.0;
            for (double y = -12.0; y <= 12.0; y += h) s += hermite(m, y) * hermite(n, y);
            CHECK(s * h == Approx(m == n ? 1.0 : 0.0).margin(1e-9));
        }
    }
}

TEST_CASE("negative Hermite index is rejected") { CHECK_THROWS_AS(hermite(-1, 0.0), Error); }

TEST_CASE("catalogue evaluation") {
    CHECK(ScalarFn::constant(2.5)(7.0) == 2.5);
    CHECK(ScalarFn::identity(2.0)(0.25) == 0.5);
    CHECK(ScalarFn::bounded_sigmoid(3.0)(1.0) == Approx(1.5));
    CHECK(ScalarFn::gaussian(0.5, 10.0, 5.0)(-0.5) == Approx(0.5));
    CHECK(ScalarFn::gaussian(0.5, 10.0, 5.0)(0.0) == Approx(0.5 * std::exp(-25.0)));
    CHECK(ScalarFn::hermite_input(0, 10.0, 5.0, 1.0)(-0.5) == Approx(1.0 + std::pow(std::numbers::pi, -0.25)));
    const auto K = ScalarFn::indicator(-1.0, -std::numeric_limits<double>::infinity(), 0.0);
    CHECK(K(-0.3) == -1.0);
    CHECK(K(0.0) == -1.0);
    CHECK(K(0.05) == 0.0);
    CHECK(ScalarFn().is_constant());
}

TEST_CASE("coefficient validation") {
    CoefficientFns c;
    CHECK_NOTHROW(c.validate());
    c.a = -1.0;
    CHECK_THROWS_AS(c.validate(), Error);
    c.a = 1.0;
    c.epsilon = 0.0;
    CHECK_THROWS_AS(c.validate(), Error);
}
