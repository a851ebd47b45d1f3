#pragma once

// Scharfetter-Gummel Maxwellian weights and the shifted-tridiagonal v-operator.
//
// Index convention. The operator acts on the n = n_v interior unknowns
// p_0 .. p_{n_v-1} of one weight column (p_{n_v} = 0 is the absorbing node).
// Row/column k of the 1-based matrix in the literature is cell i = k - 1 here,
// so the reset entry at (r+1, n_v) lives at (r, n_v - 1).
//
// With face ratios rho+_i = M_{i+1/2}/M_i and rho-_i = M_{i+1/2}/M_{i+1}
// (faces i + 1/2, i = 0..n_v-2), row i of M reads
//
//   M(i, i-1) = -rho+_{i-1}
//   M(i, i+1) = -rho-_i
//   M(i, i)   =  rho+_i + rho-_{i-1}      (missing faces dropped)
//   M(n-1, n-1) gets an extra +1          (firing outflow)
//   M(r, n-1)   gets an extra -1          (reinjection at V_R)
//
// so every column of M sums to zero.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "nnlif/error.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/model.hpp"

namespace nnlif {

inline constexpr double kDefaultExponentGuard = 700.0;

/// Maxwellian data of one weight column, stored as exponents
/// g_i = (v_i - c_j)^2 / (2a) with drift centre c_j = I(w_j) + w_j sigma(Nbar).
/// M_i = exp(-g_i) is never formed in the hot paths; only exponent
/// differences enter the ratio tables.
struct MaxwellianColumn {
    int j = 0;
    double nbar = 0.0;
    double drift_center = 0.0;
    int reset_index = 0;
    std::vector<double> g;          ///< exponents, i = 0..n_v-1
    std::vector<double> rho_plus;   ///< M_{i+1/2}/M_i,     i = 0..n_v-2
    std::vector<double> rho_minus;  ///< M_{i+1/2}/M_{i+1}, i = 0..n_v-2
    std::vector<double> node_ratio; ///< M_i/M_{i+1} = exp(g_{i+1} - g_i)

    int size() const noexcept { return static_cast<int>(g.size()); }
    double node_weight(int i) const { return std::exp(-g[i]); }
};

/// Column from an explicit drift centre (I(w_j) + w_j sigma(Nbar)).
inline MaxwellianColumn build_column(const GridSpec& grid, double a, double drift_center, int j, double nbar,
                                     double exponent_guard = kDefaultExponentGuard) {
    const int n = grid.n_v();
    MaxwellianColumn col;
    col.j = j;
    col.nbar = nbar;
    col.drift_center = drift_center;
    col.reset_index = grid.reset_index();
    col.g.resize(n);
    col.rho_plus.resize(n - 1);
    col.rho_minus.resize(n - 1);
    col.node_ratio.resize(n - 1);
    for (int i = 0; i < n; ++i) {
        const double h = grid.v(i) - drift_center;
        col.g[i] = h * h / (2.0 * a);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double d = col.g[i + 1] - col.g[i];
        if (!(std::abs(d) <= exponent_guard)) {
            throw Error(ErrorCode::ExponentOverflow,
                        "Maxwellian exponent jump " + std::to_string(d) + " at column " + std::to_string(j) +
                            ", face " + std::to_string(i));
        }
        const double e = std::exp(d);
        col.node_ratio[i] = e;
        // Harmonic-mean identities: rho+ = 2/(1+e^d), rho- = 2/(1+e^-d).
        col.rho_plus[i] = 2.0 / (1.0 + e);
        col.rho_minus[i] = 2.0 / (1.0 + std::exp(-d));
    }
    return col;
}

/// Column for weight node j at total firing rate nbar. The Maxwellian drift
/// carries the w_j factor in front of sigma(Nbar), as in the PDE's drift
/// -v + I(w) + w sigma(Nbar).
inline MaxwellianColumn build_column(const GridSpec& grid, const CoefficientFns& coeffs, int j, double nbar,
                                     double exponent_guard = kDefaultExponentGuard) {
    if (!(nbar >= 0.0) || !std::isfinite(nbar)) {
        throw Error(ErrorCode::InvalidArgument, "total firing rate must be finite and nonnegative");
    }
    const double w = grid.w(j);
    const double center = coeffs.input(w) + w * coeffs.transfer(nbar);
    return build_column(grid, coeffs.a, center, j, nbar, exponent_guard);
}

/// eps I + lambda M for one column: tridiagonal part of M plus the single
/// reinjection entry at (shift_row, shift_col).
struct ShiftedTridiagonal {
    int n = 0;
    std::vector<double> diag;   ///< M(k, k)
    std::vector<double> sub;    ///< M(k+1, k), k = 0..n-2
    std::vector<double> super;  ///< M(k, k+1), k = 0..n-2
    int shift_row = 0;
    int shift_col = 0;
    double shift_value = -1.0;
    double lambda = 0.0;   ///< a dt / dv^2
    double epsilon = 1.0;

    /// y = M x
    std::vector<double> apply_operator(std::span<const double> x) const {
        std::vector<double> y(n, 0.0);
        for (int k = 0; k < n; ++k) {
            double s = diag[k] * x[k];
            if (k > 0) s += sub[k - 1] * x[k - 1];
            if (k + 1 < n) s += super[k] * x[k + 1];
            y[k] = s;
        }
        y[shift_row] += shift_value * x[shift_col];
        return y;
    }

    /// y = (eps I + lambda M) x
    std::vector<double> apply(std::span<const double> x) const {
        auto y = apply_operator(x);
        for (int k = 0; k < n; ++k) {
            y[k] = epsilon * x[k] + lambda * y[k];
        }
        return y;
    }

    /// Dense M, row-major.
    std::vector<double> dense_operator() const {
        std::vector<double> m(static_cast<std::size_t>(n) * n, 0.0);
        for (int k = 0; k < n; ++k) {
            m[k * n + k] = diag[k];
            if (k > 0) m[k * n + k - 1] = sub[k - 1];
            if (k + 1 < n) m[k * n + k + 1] = super[k];
        }
        m[shift_row * n + shift_col] += shift_value;
        return m;
    }

    /// Dense eps I + lambda M, row-major.
    std::vector<double> dense_system() const {
        auto m = dense_operator();
        for (auto& x : m) x *= lambda;
        for (int k = 0; k < n; ++k) m[k * n + k] += epsilon;
        return m;
    }
};

inline ShiftedTridiagonal assemble_matrix(const MaxwellianColumn& col, double lambda, double epsilon) {
    const int n = col.size();
    ShiftedTridiagonal m;
    m.n = n;
    m.diag.assign(n, 0.0);
    m.sub.resize(n - 1);
    m.super.resize(n - 1);
    for (int i = 0; i + 1 < n; ++i) {
        m.sub[i] = -col.rho_plus[i];
        m.super[i] = -col.rho_minus[i];
        m.diag[i] += col.rho_plus[i];
        m.diag[i + 1] += col.rho_minus[i];
    }
    m.diag[n - 1] += 1.0;
    m.shift_row = col.reset_index;
    m.shift_col = n - 1;
    m.shift_value = -1.0;
    m.lambda = lambda;
    m.epsilon = epsilon;
    return m;
}

/// Assembles with lambda = a dt / dv^2 and the model epsilon.
inline ShiftedTridiagonal assemble_matrix(const MaxwellianColumn& col, const GridSpec& grid,
                                          const CoefficientFns& coeffs) {
    return assemble_matrix(col, coeffs.a * grid.dt() / (grid.dv() * grid.dv()), coeffs.epsilon);
}

/// Discrete v-fluxes F_{i+1/2} of a column density (faces i = -1..n_v-1,
/// returned at index i + 1). Boundary faces are zero.
inline std::vector<double> face_fluxes(const MaxwellianColumn& col, const GridSpec& grid, double a,
                                       std::span<const double> p) {
    const int n = col.size();
    const double scale = a / grid.dv();
    const double firing = scale * p[n - 1];
    std::vector<double> flux(n + 1, 0.0);
    for (int i = 0; i + 1 < n; ++i) {
        const double eta = i >= col.reset_index ? 1.0 : 0.0;
        flux[i + 1] = scale * (col.rho_minus[i] * p[i + 1] - col.rho_plus[i] * p[i]) + firing * eta;
    }
    return flux;
}

/// Strictly positive null vector of M, normalized to q_{n_v-1} = 1, from the
/// zero-flux backward recurrence
///
///   q_i = (M_i/M_{i+1}) q_{i+1} + (M_i/M_{i+1/2}) q_{n_v-1}   for i = n_v-2 .. r
///   q_i = (M_i/M_{i+1}) q_{i+1}                               for i = r-1 .. 0
///
/// Throws KERNEL_RESIDUAL if the result does not annihilate the assembled operator.
inline std::vector<double> kernel_vector(const MaxwellianColumn& col, bool verify = true) {
    const int n = col.size();
    const int r = col.reset_index;
    std::vector<double> q(n, 0.0);
    q[n - 1] = 1.0;
    double last = 1.0;
    constexpr double kRescale = 1e250;
    for (int i = n - 2; i >= 0; --i) {
        double v = col.node_ratio[i] * q[i + 1];
        if (i >= r) {
            v += last / col.rho_plus[i];
        }
        q[i] = v;
        if (v > kRescale) {
            for (int k = i; k < n; ++k) q[k] /= kRescale;
            last /= kRescale;
        }
    }
    if (verify) {
        const auto m = assemble_matrix(col, 1.0, 0.0);
        const auto mq = m.apply_operator(q);
        for (int k = 0; k < n; ++k) {
            double scale = std::abs(m.diag[k] * q[k]);
            if (k > 0) scale += std::abs(m.sub[k - 1] * q[k - 1]);
            if (k + 1 < n) scale += std::abs(m.super[k] * q[k + 1]);
            if (k == m.shift_row) scale += std::abs(q[m.shift_col]);
            if (!(std::abs(mq[k]) <= 1e-10 * scale)) {
                throw Error(ErrorCode::KernelResidual, "kernel residual check failed at row " + std::to_string(k));
            }
        }
    }
    return q;
}

/// Dense Gaussian elimination with partial pivoting; a is row-major n x n.
/// Returns false if a pivot vanishes.
inline bool dense_solve(std::vector<double> a, std::vector<double> b, int n, std::vector<double>& x) {
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i) {
            if (std::abs(a[i * n + k]) > std::abs(a[piv * n + k])) piv = i;
        }
        if (a[piv * n + k] == 0.0 || !std::isfinite(a[piv * n + k])) return false;
        if (piv != k) {
            for (int c = 0; c < n; ++c) std::swap(a[k * n + c], a[piv * n + c]);
            std::swap(b[k], b[piv]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double l = a[i * n + k] / a[k * n + k];
            if (l == 0.0) continue;
            for (int c = k; c < n; ++c) a[i * n + c] -= l * a[k * n + c];
            b[i] -= l * b[k];
        }
    }
    x.assign(n, 0.0);
    for (int k = n - 1; k >= 0; --k) {
        double s = b[k];
        for (int c = k + 1; c < n; ++c) s -= a[k * n + c] * x[c];
        x[k] = s / a[k * n + k];
    }
    return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

namespace detail {

/// Componentwise backward error max_k |Ax - b|_k / (|A||x| + |b|)_k, for b scaled to order one.
inline double backward_error(const ShiftedTridiagonal& m, std::span<const double> x, std::span<const double> b) {
    const int n = m.n;
    const auto ax = m.apply(x);
    // absolute floor: residuals at underflow level do not count
    const double tiny = (n + 1) * std::numeric_limits<double>::min() / std::numeric_limits<double>::epsilon();
    double worst = 0.0;
    for (int k = 0; k < n; ++k) {
        double scale = std::abs(m.epsilon * x[k]) + m.lambda * std::abs(m.diag[k] * x[k]) + std::abs(b[k]);
        if (k > 0) scale += m.lambda * std::abs(m.sub[k - 1] * x[k - 1]);
        if (k + 1 < n) scale += m.lambda * std::abs(m.super[k] * x[k + 1]);
        if (k == m.shift_row) scale += m.lambda * std::abs(m.shift_value * x[m.shift_col]);
        const double res = std::abs(ax[k] - b[k]);
        if (res == 0.0) continue;
        worst = std::max(worst, res / (scale + tiny));
    }
    return worst;
}

}  // namespace detail

/// Solves (eps I + lambda M) x = b.
///
/// Elimination runs top-down without pivoting; fill-in is confined to the last
/// column. Because every column of eps I + lambda M sums to eps and its
/// off-diagonals are nonpositive, each pivot is recovered as (tracked Schur
/// column sum) minus (off-diagonal part below it), a sum of nonnegative terms.
/// No subtraction of comparable quantities occurs, so the solve stays
/// componentwise accurate even when eps << lambda and the system is nearly
/// singular. A dense partial-pivot solve is the fallback.
inline std::vector<double> solve_shifted(const ShiftedTridiagonal& m, std::span<const double> b) {
    const int n = m.n;
    if (static_cast<int>(b.size()) < n) {
        throw Error(ErrorCode::InvalidArgument, "right-hand side shorter than system");
    }
    // Work on b scaled by an exact power of two so tiny (subnormal) data keeps full precision.
    double bmax = 0.0;
    for (int k = 0; k < n; ++k) bmax = std::max(bmax, std::abs(b[k]));
    if (bmax == 0.0) return std::vector<double>(n, 0.0);
    const int exponent = std::ilogb(bmax);
    std::vector<double> bs(n);
    for (int k = 0; k < n; ++k) bs[k] = std::ldexp(b[k], -exponent);

    const double lam = m.lambda;
    std::vector<double> sub(n - 1), sup(n - 1), spike(n, 0.0), colsum(n, m.epsilon), pivot(n);
    std::vector<double> y(bs);
    for (int k = 0; k + 1 < n; ++k) {
        sub[k] = lam * m.sub[k];
        sup[k] = lam * m.super[k];
    }
    // Entries of the last column above the superdiagonal live in spike[k]
    // (k <= n-3); for k = n-2 the last column is the superdiagonal itself.
    const double shift = lam * m.shift_value;
    if (m.shift_col == n - 1) {
        if (m.shift_row <= n - 3) {
            spike[m.shift_row] += shift;
        } else if (m.shift_row == n - 2) {
            sup[n - 2] += shift;
        }
    }
    const bool gth_applicable = m.shift_col == n - 1 && m.shift_row < n - 1 && m.epsilon > 0.0;

    std::vector<double> x(n, 0.0);
    bool ok = gth_applicable;
    if (ok) {
        for (int k = 0; k + 1 < n; ++k) {
            pivot[k] = colsum[k] - sub[k];
            if (!(pivot[k] > 0.0)) {
                ok = false;
                break;
            }
            const double l = sub[k] / pivot[k];
            const double c = colsum[k] / pivot[k];
            colsum[k + 1] -= c * sup[k];
            if (k <= n - 3) {
                colsum[n - 1] -= c * spike[k];
                if (k + 1 <= n - 3) {
                    spike[k + 1] -= l * spike[k];
                } else {
                    sup[k + 1] -= l * spike[k];
                }
            }
            y[k + 1] -= l * y[k];
        }
        pivot[n - 1] = colsum[n - 1];
        ok = ok && pivot[n - 1] > 0.0;
    }
    if (ok) {
        x[n - 1] = y[n - 1] / pivot[n - 1];
        for (int k = n - 2; k >= 0; --k) {
            double s = y[k] - sup[k] * x[k + 1];
            if (k <= n - 3) s -= spike[k] * x[n - 1];
            x[k] = s / pivot[k];
        }
        ok = std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); }) &&
             detail::backward_error(m, x, bs) <= 1e-12;
    }
    if (!ok) {
        if (!dense_solve(m.dense_system(), bs, n, x) || !(detail::backward_error(m, x, bs) <= 1e-10)) {
            throw Error(ErrorCode::SingularSystem, "shifted tridiagonal system could not be solved");
        }
    }
    for (double& v : x) v = std::ldexp(v, exponent);
    return x;
}

}  // namespace nnlif
