#include <catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "nnlif/grid.hpp"
#include "nnlif/model.hpp"

using namespace nnlif;
using Catch::Approx;

namespace {

Domain box(double v_min, double v_F, double v_R) {
    Domain d;
    d.v_min = v_min;
    d.v_F = v_F;
    d.v_R = v_R;
    return d;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::Io;
}

}  // namespace

TEST_CASE("grid steps and reset index") {
    const auto g = build_grid(box(-4.0, 2.0, 1.0), {60, 120, 100});
    CHECK(g.dv() == Approx(0.1));
    CHECK(g.dw() == Approx(0.01));
    CHECK(g.dt() == Approx(1e-3));
    CHECK(g.reset_index() == 50);
    CHECK(g.node_count() == 61u * 121u);
    CHECK(g.v(50) == Approx(1.0));
    CHECK(g.w(0) == Approx(-1.1));
}

TEST_CASE("grid rejects a reset potential off the lattice") {
    CHECK(code_of([] { build_grid(box(-4.0, 2.0, 1.0), {7, 10, 10}); }) == ErrorCode::ResetOffGrid);
}

TEST_CASE("two-cell grid has no interior cell above the reset node") {
    // r = 1 violates 1 <= r <= n_v - 2 when n_v = 2.
    CHECK(code_of([] { build_grid(box(-1.0, 1.0, 0.0), {2, 10, 10}); }) == ErrorCode::ResetOffGrid);
    const auto g = build_grid(box(-1.0, 2.0, 0.0), {3, 10, 10});
    CHECK(g.dv() == Approx(1.0));
    CHECK(g.reset_index() == 1);
}

TEST_CASE("degenerate domains are rejected") {
    CHECK(code_of([] { build_grid(box(2.0, 2.0, 1.0), {60, 10, 10}); }) == ErrorCode::DegenerateDomain);
    CHECK(code_of([] { build_grid(box(-4.0, 2.0, 3.0), {60, 10, 10}); }) == ErrorCode::DegenerateDomain);
    Domain d;
    d.w_max = d.w_min;
    CHECK(code_of([&] { build_grid(d, {60, 10, 10}); }) == ErrorCode::DegenerateDomain);
    CHECK(code_of([] { build_grid(Domain{}, {60, 10, 1}); }) == ErrorCode::DegenerateDomain);
    CHECK(code_of([] { GridSpec::from_steps(Domain{}, 0.07, 0.01, 1e-3); }) == ErrorCode::DegenerateDomain);
}

TEST_CASE("zero duration grid") {
    Domain d;
    d.t_max = 0.0;
    const auto g = build_grid(d, {60, 120, 0});
    CHECK(g.n_t() == 0);
    CHECK(g.dt() == 0.0);
}

TEST_CASE("sine window initial condition") {
    const auto g = GridSpec::from_steps(Domain{}, 0.1, 0.01, 1e-3);
    const auto p = init_density(g, {}, 1.0);
    // v = 0.5 is node 45, w = -0.5 is node 60
    CHECK(p(45, 60) == Approx(1.0).margin(1e-14));
    CHECK(p(55, 60) == 0.0);  // v = 1.5 lies outside the window
    for (int j = 0; j <= g.n_w(); ++j) CHECK(p(g.n_v(), j) == 0.0);
}

TEST_CASE("discrete mass of the sine window converges to one half") {
    double previous = 1.0;
    for (double h : {0.1, 0.05, 0.025}) {
        const auto g = GridSpec::from_steps(Domain{}, h, h / 10.0, 1e-3);
        const double err = std::abs(init_density(g, {}, 1.0).mass(g) - 0.5);
        CHECK(err <= 10.0 * (h * h + h * h / 100.0) + 1e-15);
        CHECK(err <= previous);
        previous = err;
    }
}

TEST_CASE("normalized initial condition carries unit mass") {
    const auto g = GridSpec::from_steps(Domain{}, 0.1, 0.01, 1e-3);
    InitialCondition ic;
    ic.normalize = true;
    CHECK(init_density(g, ic, 1.0).mass(g) == Approx(1.0).epsilon(1e-12));
    ic.shape = init::GaussianProduct{};
    CHECK(init_density(g, ic, 1.0).mass(g) == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("negative tabulated initial data is rejected") {
    const auto g = GridSpec::from_steps(Domain{}, 0.1, 0.01, 1e-3);
    std::vector<double> values(g.node_count(), 0.0);
    values[5] = -1e-3;
    CHECK(code_of([&] { init_density(g, {init::Tabulated{values}, false}, 1.0); }) == ErrorCode::NegativeInitial);
}

TEST_CASE("firing rate observables") {
    const auto g = GridSpec::from_steps(Domain{}, 0.1, 0.01, 1e-3);
    std::vector<double> p(g.node_count(), 0.0);
    SECTION("zero state") {
        const auto s = DensityState(g, p, 1.0);
        CHECK(s.Nbar() == 0.0);
        for (double n : s.observables().N) CHECK(n == 0.0);
        for (double h : s.observables().H) CHECK(h == 0.0);
    }
    SECTION("single column") {
        const int j = 40;
        p[static_cast<std::size_t>(j) * (g.n_v() + 1) + g.n_v() - 1] = 0.02;
        const auto s = DensityState(g, p, 1.0);
        CHECK(s.observables().N[j] == Approx(0.2));
        CHECK(s.Nbar() == Approx(0.002));
        CHECK(s.observables().H[j] == Approx(0.002));
    }
    SECTION("marginal sums to mass") {
        const auto s = init_density(g, {}, 1.0);
        double total = 0.0;
        for (double h : s.observables().H) total += h;
        CHECK(g.dw() * total == Approx(s.mass(g)).epsilon(1e-13));
    }
}
