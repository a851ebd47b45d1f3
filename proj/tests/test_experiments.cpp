#include <catch_amalgamated.hpp>
#include <cmath>

#include "nnlif/criteria.hpp"
#include "nnlif/experiments.hpp"

using namespace nnlif;
using Catch::Approx;

TEST_CASE("linear fit of an exact line") {
    const std::vector<double> x{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> y{1.0, 3.0, 5.0, 7.0};
    const auto f = linear_fit(x, y);
    CHECK(f.slope == Approx(2.0));
    CHECK(f.intercept == Approx(1.0));
    CHECK(f.r2 == Approx(1.0));
    CHECK(f.points == 4);
}

TEST_CASE("triangle fit") {
    const auto grid = presets::orders().grid();
    std::vector<double> N(grid.n_w() + 1, 0.0);
    for (int j = 0; j <= grid.n_w(); ++j) {
        const double w = grid.w(j);
        if (w > -0.6 && w < 0.0) N[j] = -w;
    }
    const auto t = triangle_fit(N, grid, -1.0);
    CHECK(t.fit.r2 == Approx(1.0));
    CHECK(t.fit.slope == Approx(1.0));
    CHECK(t.support_left == Approx(-0.59));
}

TEST_CASE("parallel order study is thread-count independent") {
    auto base = presets::orders(0.02);
    const auto one = order_study(base, Direction::T, 2e-3, 3, 1);
    const auto four = order_study(base, Direction::T, 2e-3, 3, 4);
    CHECK(one.diff_l1 == four.diff_l1);
    CHECK(one.order_l1 == four.order_l1);
}

TEST_CASE("w and t orders at T = 0.1") {
    for (auto d : {Direction::W, Direction::T}) {
        const auto st = order_study(presets::orders(), d, default_coarse_step(d), 5, 2);
        const auto v = criteria::order_band(st);
        INFO(v.detail);
        CHECK(v.pass);
    }
}

TEST_CASE("AP distances with eps much larger than dt agree across variants") {
    const auto fi = ap_curve(presets::ap(1e-1, 5e-4, SchemeVariant::fi()), 100);
    const auto si = ap_curve(presets::ap(1e-1, 5e-4, SchemeVariant::si()), 100);
    const double ratio = fi.final_distance() / si.final_distance();
    CHECK(ratio < 3.0);
    CHECK(ratio > 1.0 / 3.0);
}

TEST_CASE("zero-duration learning keeps the initial marginal") {
    auto cfg = presets::learning(presets::inhibitory_input(0));
    cfg.domain.t_max = 0.0;
    const auto learned = learn(cfg);
    const auto grid = cfg.grid();
    const auto initial = init_density(grid, cfg.initial, cfg.coeffs.a);
    CHECK(learned.H == initial.observables().H);
    const auto r = react(learned, cfg, presets::inhibitory_input(0));
    QuasiSteadyOptions opts;
    opts.input_override = presets::inhibitory_input(0);
    opts.nbar_guess = learned.nbar;
    const auto qs = quasi_steady(initial.observables().H, grid, cfg.coeffs, opts);
    CHECK(r.N == qs.N);
}

TEST_CASE("learning the same input gives a triangular response") {
    const auto m = inhibitory_recognition(true, 1);
    const auto v = criteria::recognition(m);
    INFO(v.detail);
    CHECK(v.pass);
    const auto& d = m.cell(0, 0);
    REQUIRE(d);
    CHECK(d->triangle.support_right <= 1e-12);
    CHECK(d->triangle.fit.slope > 0.0);
}

TEST_CASE("mismatched test input fits the triangle markedly worse") {
    const auto cfg = presets::learning(presets::inhibitory_input(0));
    const auto learned = learn(cfg);
    const auto same = react(learned, cfg, presets::inhibitory_input(0));
    const auto other = react(learned, cfg, presets::inhibitory_input(1));
    CHECK(1.0 - other.triangle.fit.r2 >= 5.0 * (1.0 - same.triangle.fit.r2));
}

TEST_CASE("excitatory steady scenario converges to a right triangle") {
    const auto r = excitatory_scenario(presets::Scenario::Steady);
    CHECK(r.classification == Classification::Converged);
    CHECK(r.triangle.fit.r2 >= 0.95);
    CHECK(r.triangle.fit.slope > 0.0);
    CHECK(r.triangle.support_left >= 0.0);
    CHECK_FALSE(r.support_reaches_boundary);
}

TEST_CASE("excitatory unsteady scenario expands with growing firing rate") {
    const auto r = excitatory_scenario(presets::Scenario::Unsteady);
    CHECK(r.classification == Classification::Expanding);
    CHECK(r.nbar_increasing);
    const auto& traj = r.run.trajectory;
    for (std::size_t k = traj.size() / 2 + 1; k < traj.size(); ++k) CHECK(traj[k].nbar > traj[k - 1].nbar);
}

TEST_CASE("excitatory setup without coupling converges") {
    auto cfg = presets::excitatory(presets::Scenario::Steady);
    cfg.coeffs.transfer = ScalarFn::constant(0.0);
    const auto r = excitatory_run(cfg, presets::Scenario::Steady);
    CHECK(r.classification == Classification::Converged);
}

TEST_CASE("classifier flags a stalled but unsettled run as undetermined") {
    ExcitatoryResult r;
    const auto grid = presets::orders(0.01).grid();
    std::vector<double> p(grid.node_count(), 0.0);
    p[static_cast<std::size_t>(50) * (grid.n_v() + 1) + 10] = 1.0;
    r.run.final_state = DensityState(grid, p, 1.0);
    r.H_lagged.assign(grid.n_w() + 1, 0.0);  // H changed completely over the lag
    for (int m = 0; m <= 10; ++m) r.run.trajectory.push_back({m, 0.0, 1.0, 1.0, 0.0, -0.5, -0.5});
    const auto c = classify_trajectory(r, grid);
    CHECK(c.classification == Classification::Undetermined);
}
