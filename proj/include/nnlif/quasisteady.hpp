#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nnlif/error.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/maxwellian.hpp"
#include "nnlif/model.hpp"
#include "nnlif/numeric.hpp"

namespace nnlif {

struct QuasiSteadyOptions {
    double tolerance = 1e-12;  ///< absolute, on |Nbar^(k+1) - Nbar^(k)|
    int max_iterations = 1000;
    double nbar_guess = 0.0;
    /// Replaces I(w) (testing phase); H, K and sigma stay as they are.
    std::optional<ScalarFn> input_override;
    double exponent_guard = kDefaultExponentGuard;
};

/// Discrete v-wise equilibrium for a prescribed weight marginal: every column
/// is the positive kernel of M_j^{Nbar} scaled to dv sum_i P_{i,j} = H_j, with
/// Nbar found self-consistently.
struct QuasiSteadyState {
    std::vector<double> P;  ///< DensityState layout
    std::vector<double> N;
    double nbar = 0.0;       ///< total firing rate of P
    double nbar_used = 0.0;  ///< Nbar the final Maxwellians were built with
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> trace;  ///< Nbar^(0), Nbar^(1), ...
};

namespace detail {

inline double fill_quasi_steady(std::span<const double> H, const GridSpec& grid, const CoefficientFns& coeffs,
                                const ScalarFn& input, double nbar, double guard, std::vector<double>& P,
                                std::vector<double>& N) {
    const int nv = grid.n_v();
    const double sigma = coeffs.transfer(nbar);
    for (int j = 0; j <= grid.n_w(); ++j) {
        const std::size_t off = static_cast<std::size_t>(j) * (nv + 1);
        if (H[j] == 0.0) {
            std::fill(P.begin() + off, P.begin() + off + nv + 1, 0.0);
            N[j] = 0.0;
            continue;
        }
        const double w = grid.w(j);
        const auto col = build_column(grid, coeffs.a, input(w) + w * sigma, j, nbar, guard);
        const auto q = kernel_vector(col, false);
        const double scale = H[j] / (grid.dv() * compensated_sum(q));
        for (int i = 0; i < nv; ++i) P[off + i] = scale * q[i];
        P[off + nv] = 0.0;
        N[j] = coeffs.a * P[off + nv - 1] / grid.dv();
    }
    return std::max(0.0, grid.dw() * compensated_sum(N));
}

}  // namespace detail

inline QuasiSteadyState quasi_steady(std::span<const double> H, const GridSpec& grid, const CoefficientFns& coeffs,
                                     const QuasiSteadyOptions& opts = {}) {
    if (static_cast<int>(H.size()) != grid.n_w() + 1) {
        throw Error(ErrorCode::InvalidArgument, "weight marginal has wrong length");
    }
    for (double h : H) {
        if (!(h >= 0.0) || !std::isfinite(h)) {
            throw Error(ErrorCode::InvalidArgument, "weight marginal must be finite and nonnegative");
        }
    }
    if (!(opts.tolerance > 0.0) || opts.max_iterations < 1) {
        throw Error(ErrorCode::InvalidArgument, "quasi-steady tolerance must be positive, max_iterations >= 1");
    }
    const ScalarFn& input = opts.input_override ? *opts.input_override : coeffs.input;

    QuasiSteadyState qs;
    qs.P.assign(grid.node_count(), 0.0);
    qs.N.assign(grid.n_w() + 1, 0.0);
    double nbar = std::max(0.0, opts.nbar_guess);
    qs.trace.push_back(nbar);
    for (int k = 1; k <= opts.max_iterations; ++k) {
        const double updated =
            detail::fill_quasi_steady(H, grid, coeffs, input, nbar, opts.exponent_guard, qs.P, qs.N);
        qs.trace.push_back(updated);
        qs.iterations = k;
        qs.final_residual = std::abs(updated - nbar);
        const bool same_operator = coeffs.transfer(updated) == coeffs.transfer(nbar);
        // Report the firing rate of the returned profile, not the one it was built from.
        qs.nbar = updated;
        qs.nbar_used = nbar;
        if (qs.final_residual <= opts.tolerance || same_operator) {
            qs.converged = true;
            break;
        }
        nbar = updated;
    }
    return qs;
}

/// Convenience: quasi-steady state for the marginal of a density, starting
/// from that density's own total firing rate.
inline QuasiSteadyState quasi_steady(const DensityState& state, const GridSpec& grid, const CoefficientFns& coeffs,
                                     QuasiSteadyOptions opts = {}) {
    opts.nbar_guess = state.Nbar();
    return quasi_steady(state.observables().H, grid, coeffs, opts);
}

/// dv dw sum |p - P|
inline double ap_distance(std::span<const double> p, std::span<const double> P, const GridSpec& grid) {
    if (p.size() != P.size()) {
        throw Error(ErrorCode::InvalidArgument, "shape mismatch in ap_distance");
    }
    std::vector<double> diff(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) diff[k] = std::abs(p[k] - P[k]);
    return grid.dv() * grid.dw() * compensated_sum(diff);
}

inline double ap_distance(const DensityState& p, const QuasiSteadyState& qs, const GridSpec& grid) {
    return ap_distance(p.values(), qs.P, grid);
}

}  // namespace nnlif
