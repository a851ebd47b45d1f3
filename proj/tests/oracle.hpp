#pragma once

// Dense reference computations for small columns. The operator is built
// directly from Maxwellian node weights exp(-(v - c)^2 / 2a) and harmonic-mean
// face weights, independently of the library's exponent/ratio tables, and
// solved with Eigen in long double.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "nnlif/grid.hpp"
#include "nnlif/maxwellian.hpp"
#include "nnlif/model.hpp"
#include "nnlif/quasisteady.hpp"

namespace oracle {

using Real = long double;
using Mat = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using Vec = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// M acting on the n_v interior unknowns of one column.
inline Mat dense_operator(const nnlif::GridSpec& grid, double a, double center) {
    const int n = grid.n_v();
    const int r = grid.reset_index();
    std::vector<Real> m(n);
    for (int i = 0; i < n; ++i) {
        const Real h = static_cast<Real>(grid.v(i)) - center;
        m[i] = std::exp(-h * h / (2.0L * a));
    }
    std::vector<Real> face(n - 1);
    for (int i = 0; i + 1 < n; ++i) face[i] = 2.0L * m[i] * m[i + 1] / (m[i] + m[i + 1]);
    Mat M = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        if (i > 0) {
            M(i, i - 1) = -face[i - 1] / m[i - 1];
            M(i, i) += face[i - 1] / m[i];
        }
        if (i + 1 < n) {
            M(i, i + 1) = -face[i] / m[i + 1];
            M(i, i) += face[i] / m[i];
        }
    }
    M(n - 1, n - 1) += 1.0L;
    M(r, n - 1) -= 1.0L;
    return M;
}

/// Null vector of M from the singular vector of the smallest singular value,
/// normalized to last entry 1.
inline Vec nullspace(const Mat& M) {
    Eigen::JacobiSVD<Mat> svd(M, Eigen::ComputeFullV);
    Vec q = svd.matrixV().col(M.cols() - 1);
    return q / q(q.size() - 1);
}

inline Vec solve(const Mat& A, const Vec& b) { return A.fullPivLu().solve(b); }

inline Vec to_vec(const std::vector<double>& x) {
    Vec v(static_cast<Eigen::Index>(x.size()));
    for (std::size_t k = 0; k < x.size(); ++k) v(static_cast<Eigen::Index>(k)) = x[k];
    return v;
}

/// max_k |x_k - y_k| / max_k |y_k|
inline double relative_error(const std::vector<double>& x, const Vec& y) {
    Real num = 0.0L, den = 0.0L;
    for (Eigen::Index k = 0; k < y.size(); ++k) {
        num = std::max(num, std::abs(static_cast<Real>(x[k]) - y(k)));
        den = std::max(den, std::abs(y(k)));
    }
    return static_cast<double>(num / den);
}

/// One random small column problem.
struct Instance {
    nnlif::GridSpec grid;
    double a = 1.0;
    double center = 0.0;
    double lambda = 1.0;
    double epsilon = 1.0;
};

inline nnlif::GridSpec random_grid(std::mt19937_64& rng, int max_nv = 8) {
    std::uniform_int_distribution<int> nv_dist(3, max_nv);
    const int n_v = nv_dist(rng);
    std::uniform_int_distribution<int> r_dist(1, n_v - 2);
    const int r = r_dist(rng);
    std::uniform_real_distribution<double> dv_dist(0.1, 0.6);
    std::uniform_real_distribution<double> vmin_dist(-3.0, -0.5);
    const double dv = dv_dist(rng);
    nnlif::Domain d;
    d.v_min = vmin_dist(rng);
    d.v_F = d.v_min + n_v * dv;
    d.v_R = d.v_min + r * dv;
    d.w_min = -1.0;
    d.w_max = 0.0;
    d.t_max = 0.1;
    return nnlif::GridSpec::build(d, {n_v, 4, 10});
}

inline Instance random_instance(std::mt19937_64& rng) {
    Instance in{random_grid(rng)};
    std::uniform_real_distribution<double> a_dist(0.3, 2.0);
    std::uniform_real_distribution<double> c_dist(-2.0, 2.0);
    std::uniform_real_distribution<double> log_lambda(-1.0, 2.0);
    std::uniform_real_distribution<double> log_eps(-7.0, 0.0);
    in.a = a_dist(rng);
    in.center = c_dist(rng);
    in.lambda = std::pow(10.0, log_lambda(rng));
    in.epsilon = std::pow(10.0, log_eps(rng));
    return in;
}

/// Relative error of kernel_vector against the dense nullspace.
inline double kernel_error(const Instance& in) {
    const auto col = nnlif::build_column(in.grid, in.a, in.center, 0, 0.0);
    const auto q = nnlif::kernel_vector(col);
    return relative_error(q, nullspace(dense_operator(in.grid, in.a, in.center)));
}

/// Relative error of solve_shifted against dense long-double elimination.
inline double solve_error(const Instance& in, const std::vector<double>& b) {
    const auto col = nnlif::build_column(in.grid, in.a, in.center, 0, 0.0);
    const auto mat = nnlif::assemble_matrix(col, in.lambda, in.epsilon);
    const auto x = nnlif::solve_shifted(mat, b);
    const Mat M = dense_operator(in.grid, in.a, in.center);
    const Mat A = static_cast<Real>(in.epsilon) * Mat::Identity(M.rows(), M.cols()) + static_cast<Real>(in.lambda) * M;
    return relative_error(x, solve(A, to_vec(b)));
}

/// max_j |M_j P_j|_inf / |P_j|_inf with M_j the dense operator at the Nbar
/// the quasi-steady profile was built with.
inline double quasi_steady_residual(const nnlif::QuasiSteadyState& qs, const nnlif::GridSpec& grid,
                                    const nnlif::CoefficientFns& coeffs, const nnlif::ScalarFn& input) {
    const int nv = grid.n_v();
    double worst = 0.0;
    for (int j = 0; j <= grid.n_w(); ++j) {
        const double w = grid.w(j);
        const double center = input(w) + w * coeffs.transfer(qs.nbar_used);
        const Mat M = dense_operator(grid, coeffs.a, center);
        Vec p(nv);
        for (int i = 0; i < nv; ++i) p(i) = qs.P[static_cast<std::size_t>(j) * (nv + 1) + i];
        const Real scale = p.cwiseAbs().maxCoeff();
        if (scale == 0.0L) continue;
        worst = std::max(worst, static_cast<double>((M * p).cwiseAbs().maxCoeff() / scale));
    }
    return worst;
}

}  // namespace oracle
