#include <catch_amalgamated.hpp>
#include <cmath>

#include "nnlif/experiments.hpp"
#include "nnlif/quasisteady.hpp"
#include "oracle.hpp"

using namespace nnlif;
using Catch::Approx;

TEST_CASE("zero marginal gives the zero state") {
    const auto grid = presets::orders().grid();
    const auto qs = quasi_steady(std::vector<double>(grid.n_w() + 1, 0.0), grid, CoefficientFns{});
    CHECK(qs.converged);
    CHECK(qs.iterations == 1);
    CHECK(qs.nbar == 0.0);
    for (double x : qs.P) CHECK(x == 0.0);
}

TEST_CASE("single column without coupling is the scaled kernel") {
    const auto grid = presets::orders().grid();
    CoefficientFns c;
    c.transfer = ScalarFn::constant(0.0);
    c.input = ScalarFn::constant(0.5);
    std::vector<double> H(grid.n_w() + 1, 0.0);
    const int j = 70;
    H[j] = 2.0;
    const auto qs = quasi_steady(H, grid, c);
    CHECK(qs.iterations == 1);
    const auto q = kernel_vector(build_column(grid, c, j, 0.0));
    double sum = 0.0;
    for (double x : q) sum += x;
    const int nv = grid.n_v();
    for (int i = 0; i < nv; ++i) {
        CHECK(qs.P[static_cast<std::size_t>(j) * (nv + 1) + i] == Approx(H[j] * q[i] / (grid.dv() * sum)));
    }
    double mass = 0.0;
    for (int i = 0; i <= nv; ++i) mass += qs.P[static_cast<std::size_t>(j) * (nv + 1) + i];
    CHECK(grid.dv() * mass == Approx(H[j]).epsilon(1e-14));
}

TEST_CASE("quasi-steady columns carry zero discrete flux") {
    const auto grid = presets::orders().grid();
    CoefficientFns c;
    c.input = ScalarFn::gaussian(0.5, 10.0, 5.0);
    const auto p = init_density(grid, {}, 1.0);
    const auto qs = quasi_steady(p, grid, c);
    REQUIRE(qs.converged);
    CHECK(qs.final_residual <= 1e-12);
    CHECK(oracle::quasi_steady_residual(qs, grid, c, c.input) <= 1e-10);
    const int nv = grid.n_v();
    for (int j = 0; j <= grid.n_w(); ++j) {
        std::vector<double> col(qs.P.begin() + j * (nv + 1), qs.P.begin() + j * (nv + 1) + nv);
        const auto F = face_fluxes(build_column(grid, c, j, qs.nbar_used), grid, c.a, col);
        double scale = 0.0;
        for (double x : col) scale = std::max(scale, x);
        for (int i = 0; i + 1 < nv; ++i) CHECK(std::abs(F[i + 1]) <= 1e-10 * c.a / grid.dv() * scale);
    }
}

TEST_CASE("AP distance") {
    const auto grid = presets::orders().grid();
    const auto p = init_density(grid, {}, 1.0);
    CHECK(ap_distance(p.values(), p.values(), grid) == 0.0);
    const std::vector<double> zero(p.values().size(), 0.0);
    CHECK(ap_distance(p.values(), zero, grid) == Approx(p.mass(grid)));
    CHECK(p.mass(grid) == Approx(0.5).epsilon(1e-3));
}

TEST_CASE("FI trajectories approach the quasi-steady state as epsilon shrinks") {
    const auto big = ap_curve(presets::ap(1e-3, 5e-4, SchemeVariant::fi()), 100);
    const auto small = ap_curve(presets::ap(1e-4, 5e-4, SchemeVariant::fi()), 100);
    CHECK(small.final_distance() < big.final_distance());
    CHECK(big.quasi_steady_failures == 0);
}

TEST_CASE("small-epsilon FI state is reproduced from its own marginal") {
    auto cfg = presets::ap(1e-6, 5e-4, SchemeVariant::fi());
    cfg.domain.t_max = 0.05;
    const auto grid = cfg.grid();
    const auto res = run(init_density(grid, cfg.initial, 1.0), grid, cfg.coeffs, cfg.variant);
    const auto qs = quasi_steady(res.final_state, grid, cfg.coeffs);
    CHECK(ap_distance(res.final_state, qs, grid) <= 1e-5 * res.final_state.mass(grid));
}

TEST_CASE("invalid marginals are rejected") {
    const auto grid = presets::orders().grid();
    CHECK_THROWS_AS(quasi_steady(std::vector<double>(3, 1.0), grid, CoefficientFns{}), Error);
    std::vector<double> H(grid.n_w() + 1, 1.0);
    H[3] = -1.0;
    CHECK_THROWS_AS(quasi_steady(H, grid, CoefficientFns{}), Error);
}
