#include <catch_amalgamated.hpp>
#include <cmath>
#include <random>

#include "nnlif/maxwellian.hpp"
#include "oracle.hpp"

using namespace nnlif;
using Catch::Approx;

namespace {

/// Column whose Maxwellian weights are all equal.
MaxwellianColumn flat_column(int n, int r) {
    MaxwellianColumn c;
    c.reset_index = r;
    c.g.assign(n, 0.0);
    c.rho_plus.assign(n - 1, 1.0);
    c.rho_minus.assign(n - 1, 1.0);
    c.node_ratio.assign(n - 1, 1.0);
    return c;
}

GridSpec standard_grid() { return GridSpec::from_steps(Domain{}, 0.1, 0.01, 1e-3); }

}  // namespace

TEST_CASE("face ratios") {
    SECTION("equal exponents") {
        const auto g = standard_grid();
        // drift centre at the midpoint of two nodes makes their exponents equal
        const auto col = build_column(g, 1.0, 0.5 * (g.v(10) + g.v(11)), 0, 0.0);
        CHECK(col.rho_plus[10] == Approx(1.0).epsilon(1e-14));
        CHECK(col.rho_minus[10] == Approx(1.0).epsilon(1e-14));
    }
    SECTION("hand evaluation at v = 0, 0.1") {
        const auto g = standard_grid();
        const auto col = build_column(g, CoefficientFns{}, 30, 0.0);  // centre I + w sigma(0) = 0
        REQUIRE(g.v(40) == Approx(0.0).margin(1e-14));
        CHECK(col.g[40] == Approx(0.0).margin(1e-14));
        CHECK(col.g[41] == Approx(0.005));
        CHECK(col.rho_plus[40] == Approx(2.0 / (1.0 + std::exp(0.005))).epsilon(1e-14));
        CHECK(col.rho_plus[40] == Approx(0.997500005208).epsilon(1e-11));
        // against the direct weights M_i = exp(-g_i) and their harmonic mean
        const double m0 = std::exp(-col.g[40]), m1 = std::exp(-col.g[41]);
        const double face = 2.0 * m0 * m1 / (m0 + m1);
        CHECK(col.rho_plus[40] == Approx(face / m0).epsilon(1e-14));
        CHECK(col.rho_minus[40] == Approx(face / m1).epsilon(1e-14));
    }
    SECTION("steep exponent limits") {
        const auto g = standard_grid();
        const auto col = build_column(g, 1e-3, -4.0, 0, 0.0);
        // g_{i+1} - g_i = (v_{i+1} + 4)^2 - (v_i + 4)^2 over 2a, about 585 at the top face
        const int i = g.n_v() - 2;
        const double d = col.g[i + 1] - col.g[i];
        REQUIRE(d > 580.0);
        CHECK(col.rho_plus[i] > 0.0);
        CHECK(col.rho_plus[i] == Approx(2.0 * std::exp(-d)).epsilon(1e-12));
        CHECK(col.rho_minus[i] == Approx(2.0).epsilon(1e-15));
    }
    SECTION("exponent guard") {
        const auto g = standard_grid();
        CHECK_THROWS_AS(build_column(g, 1e-4, -4.0, 0, 0.0), Error);
    }
}

TEST_CASE("three-cell operator with equal weights") {
    const auto m = assemble_matrix(flat_column(3, 1), 1.0, 0.0);
    CHECK(m.sub == std::vector<double>{-1.0, -1.0});
    CHECK(m.super == std::vector<double>{-1.0, -1.0});
    CHECK(m.diag == std::vector<double>{1.0, 2.0, 2.0});
    CHECK(m.shift_row == 1);
    CHECK(m.shift_col == 2);
    CHECK(m.shift_value == -1.0);
    const auto q = kernel_vector(flat_column(3, 1));
    CHECK(q == std::vector<double>{2.0, 2.0, 1.0});
    // dense nullspace of the same matrix
    oracle::Mat M(3, 3);
    const auto d = m.dense_operator();
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) M(i, k) = d[i * 3 + k];
    const auto ref = oracle::nullspace(M);
    CHECK(oracle::relative_error({q[0] / q[2], q[1] / q[2], 1.0}, ref) < 1e-15);
}

TEST_CASE("four-cell kernel with reset next to the top") {
    CHECK(kernel_vector(flat_column(4, 2)) == std::vector<double>{2.0, 2.0, 2.0, 1.0});
}

TEST_CASE("operator columns sum to zero and it is a Z-matrix") {
    const auto g = standard_grid();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> nbar(0.0, 5.0);
    std::uniform_int_distribution<int> col(0, g.n_w());
    CoefficientFns c;
    c.input = ScalarFn::gaussian(0.5, 10.0, 5.0);
    for (int k = 0; k < 100; ++k) {
        const auto m = assemble_matrix(build_column(g, c, col(rng), nbar(rng)), 1.0, 0.0);
        const auto d = m.dense_operator();
        const int n = m.n;
        for (int l = 0; l < n; ++l) {
            double s = 0.0, scale = 0.0;
            for (int i = 0; i < n; ++i) {
                s += d[i * n + l];
                scale += std::abs(d[i * n + l]);
                if (i != l) CHECK(d[i * n + l] <= 0.0);
            }
            CHECK(std::abs(s) <= 1e-14 * scale);
        }
    }
}

TEST_CASE("operator equals the negative scaled flux difference") {
    const auto g = standard_grid();
    CoefficientFns c;
    c.a = 1.3;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const auto col = build_column(g, c, static_cast<int>(u(rng) * g.n_w()), 2.0 * u(rng));
        const auto m = assemble_matrix(col, 1.0, 0.0);
        std::vector<double> p(g.n_v());
        for (auto& x : p) x = u(rng);
        const auto mp = m.apply_operator(p);
        const auto F = face_fluxes(col, g, c.a, p);
        for (int i = 0; i < g.n_v(); ++i) {
            CHECK(mp[i] == Approx(-(g.dv() / c.a) * (F[i + 1] - F[i])).margin(1e-13));
        }
    }
}

TEST_CASE("kernel is positive and annihilated") {
    const auto g = standard_grid();
    CoefficientFns c;
    c.input = ScalarFn::constant(1.0);
    for (double nbar : {0.0, 0.3, 3.0}) {
        for (int j : {0, 50, 120}) {
            const auto col = build_column(g, c, j, nbar);
            const auto q = kernel_vector(col);
            for (double x : q) CHECK(x > 0.0);
            const auto mq = assemble_matrix(col, 1.0, 0.0).apply_operator(q);
            double qmax = 0.0;
            for (double x : q) qmax = std::max(qmax, x);
            for (double r : mq) CHECK(std::abs(r) <= 1e-10 * qmax);
        }
    }
}

TEST_CASE("shifted solve special cases") {
    const auto g = standard_grid();
    const auto col = build_column(g, CoefficientFns{}, 40, 0.2);
    std::vector<double> b(g.n_v());
    for (int i = 0; i < g.n_v(); ++i) b[i] = 1.0 + std::sin(i);
    SECTION("lambda = 0 gives b / eps") {
        const auto x = solve_shifted(assemble_matrix(col, 0.0, 0.25), b);
        for (int i = 0; i < g.n_v(); ++i) CHECK(x[i] == Approx(b[i] / 0.25).epsilon(1e-15));
    }
    SECTION("rhs along the kernel returns the kernel") {
        const auto q = kernel_vector(col);
        for (double eps : {1.0, 1e-3, 1e-7}) {
            std::vector<double> eq(q.size());
            for (std::size_t i = 0; i < q.size(); ++i) eq[i] = eps * q[i];
            const auto x = solve_shifted(assemble_matrix(col, 10.0, eps), eq);
            for (std::size_t i = 0; i < q.size(); ++i) CHECK(x[i] == Approx(q[i]).epsilon(1e-12));
        }
    }
    SECTION("zero rhs") {
        const auto x = solve_shifted(assemble_matrix(col, 1.0, 1.0), std::vector<double>(g.n_v(), 0.0));
        for (double v : x) CHECK(v == 0.0);
    }
}

TEST_CASE("six-cell solve: nonnegative and matches dense elimination") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Domain d;
    d.v_min = -1.0;
    d.v_F = 2.0;
    d.v_R = 0.5;
    const auto g = GridSpec::build(d, {6, 4, 10});
    for (int trial = 0; trial < 50; ++trial) {
        oracle::Instance in{g, 0.5 + u(rng), 2.0 * u(rng) - 1.0, 10.0 * u(rng), std::pow(10.0, -6.0 * u(rng))};
        std::vector<double> b(6);
        for (auto& x : b) x = u(rng);
        const auto x = solve_shifted(assemble_matrix(build_column(g, in.a, in.center, 0, 0.0), in.lambda, in.epsilon), b);
        for (double v : x) CHECK(v >= 0.0);
        CHECK(oracle::solve_error(in, b) <= 1e-10);
    }
}

TEST_CASE("dense fallback solve") {
    std::vector<double> a{4.0, 1.0, 2.0, 3.0}, x;
    REQUIRE(dense_solve(a, {1.0, 2.0}, 2, x));
    CHECK(x[0] == Approx(0.1));
    CHECK(x[1] == Approx(0.6));
    CHECK_FALSE(dense_solve({1.0, 2.0, 2.0, 4.0}, {1.0, 2.0}, 2, x));
}
