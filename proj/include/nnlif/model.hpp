#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

#include "nnlif/error.hpp"
#include "nnlif/functions.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/numeric.hpp"

namespace nnlif {

/// Model coefficients: diffusion a, scale separation epsilon, input I(w),
/// learning strength K(w) and firing transfer sigma(Nbar).
struct CoefficientFns {
    double a = 1.0;
    double epsilon = 0.5;
    ScalarFn input = ScalarFn::constant(0.0);
    ScalarFn learning = ScalarFn::indicator(-1.0, -std::numeric_limits<double>::infinity(), 0.0);
    ScalarFn transfer = ScalarFn::identity();

    void validate() const {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw Error(ErrorCode::InvalidArgument, "diffusion coefficient a must be positive");
        }
        if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
            throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
        }
    }
};

namespace init {

/// sin^2(pi v) sin^2(pi w) on the open window (v_lo, v_hi) x (w_lo, w_hi), 0 outside.
struct SineWindow {
    double v_lo = -1.0;
    double v_hi = 1.0;
    double w_lo = -1.0;
    double w_hi = 0.0;
};

/// amplitude * exp(-((v-v_c)/v_width)^2 / 2) * exp(-((w-w_c)/w_width)^2 / 2)
struct GaussianProduct {
    double amplitude = 1.0;
    double v_center = 0.0;
    double v_width = 0.5;
    double w_center = -0.5;
    double w_width = 0.1;
};

/// Node values, column-major over j: values[j * (n_v + 1) + i].
struct Tabulated {
    std::vector<double> values;
};

}  // namespace init

struct InitialCondition {
    std::variant<init::SineWindow, init::GaussianProduct, init::Tabulated> shape = init::SineWindow{};
    bool normalize = false;
};

struct Observables {
    std::vector<double> N;  ///< firing rate per weight node
    double Nbar = 0.0;      ///< total firing rate
    std::vector<double> H;  ///< weight marginal per weight node
};

/// Firing rates and weight marginal of a node-stored density.
///
///   N_j  = a p_{n_v-1,j} / dv
///   Nbar = dw sum_{j=0..n_w} N_j
///   H_j  = dv sum_{i=0..n_v} p_{i,j}
inline Observables observables(std::span<const double> p, const GridSpec& grid, double a) {
    const int nv = grid.n_v();
    const int nw = grid.n_w();
    const std::size_t stride = static_cast<std::size_t>(nv) + 1;
    Observables obs;
    obs.N.resize(nw + 1);
    obs.H.resize(nw + 1);
    for (int j = 0; j <= nw; ++j) {
        const auto col = p.subspan(j * stride, stride);
        obs.N[j] = a * col[nv - 1] / grid.dv();
        obs.H[j] = grid.dv() * compensated_sum(col);
    }
    obs.Nbar = grid.dw() * compensated_sum(obs.N);
    return obs;
}

/// Grid function p_{i,j}^m with cached observables. Storage is column-major
/// over the weight index so each v-column is contiguous; row i = n_v is the
/// absorbing boundary and always zero.
class DensityState {
public:
    DensityState() = default;

    DensityState(const GridSpec& grid, std::vector<double> p, double a, int step = 0)
        : n_v_(grid.n_v()), n_w_(grid.n_w()), step_(step), p_(std::move(p)) {
        if (p_.size() != grid.node_count()) {
            throw Error(ErrorCode::InvalidArgument, "density size does not match grid");
        }
        refresh(grid, a);
    }

    static DensityState zeros(const GridSpec& grid, double a) {
        return DensityState(grid, std::vector<double>(grid.node_count(), 0.0), a);
    }

    int n_v() const noexcept { return n_v_; }
    int n_w() const noexcept { return n_w_; }
    int step() const noexcept { return step_; }
    void set_step(int m) noexcept { step_ = m; }

    double operator()(int i, int j) const { return p_[index(i, j)]; }
    double& operator()(int i, int j) { return p_[index(i, j)]; }

    std::span<const double> values() const noexcept { return p_; }
    std::span<double> values() noexcept { return p_; }
    std::span<const double> column(int j) const { return std::span(p_).subspan(index(0, j), n_v_ + 1); }
    std::span<double> column(int j) { return std::span(p_).subspan(index(0, j), n_v_ + 1); }

    /// Recomputes the cached observables from p (and re-zeros the boundary row).
    void refresh(const GridSpec& grid, double a) {
        for (int j = 0; j <= n_w_; ++j) {
            p_[index(n_v_, j)] = 0.0;
        }
        obs_ = nnlif::observables(p_, grid, a);
    }

    const Observables& observables() const noexcept { return obs_; }
    double Nbar() const noexcept { return obs_.Nbar; }

    /// dv dw sum p
    double mass(const GridSpec& grid) const { return grid.dv() * grid.dw() * compensated_sum(p_); }

    double min_value() const { return p_.empty() ? 0.0 : *std::min_element(p_.begin(), p_.end()); }
    double max_value() const { return p_.empty() ? 0.0 : *std::max_element(p_.begin(), p_.end()); }

private:
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(j) * static_cast<std::size_t>(n_v_ + 1) + static_cast<std::size_t>(i);
    }

    int n_v_ = 0;
    int n_w_ = 0;
    int step_ = 0;
    std::vector<double> p_;
    Observables obs_;
};

namespace detail {

inline double sample(const init::SineWindow& s, double v, double w) {
    if (!(v > s.v_lo && v < s.v_hi && w > s.w_lo && w < s.w_hi)) {
        return 0.0;
    }
    const double sv = std::sin(std::numbers::pi * v);
    const double sw = std::sin(std::numbers::pi * w);
    return sv * sv * sw * sw;
}

inline double sample(const init::GaussianProduct& g, double v, double w) {
    const double zv = (v - g.v_center) / g.v_width;
    const double zw = (w - g.w_center) / g.w_width;
    return g.amplitude * std::exp(-0.5 * (zv * zv + zw * zw));
}

}  // namespace detail

/// Samples the initial condition on the nodes; the absorbing row i = n_v is
/// zeroed. With normalize set, the result carries unit mass dv dw sum p = 1.
inline DensityState init_density(const GridSpec& grid, const InitialCondition& ic, double a) {
    std::vector<double> p(grid.node_count(), 0.0);
    const int nv = grid.n_v();
    if (const auto* tab = std::get_if<init::Tabulated>(&ic.shape)) {
        if (tab->values.size() != p.size()) {
            throw Error(ErrorCode::InvalidArgument, "tabulated initial condition has " +
                                                        std::to_string(tab->values.size()) + " values, grid needs " +
                                                        std::to_string(p.size()));
        }
        p = tab->values;
    } else {
        for (int j = 0; j <= grid.n_w(); ++j) {
            for (int i = 0; i <= nv; ++i) {
                p[static_cast<std::size_t>(j) * (nv + 1) + i] = std::visit(
                    [&](const auto& s) -> double {
                        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, init::Tabulated>) {
                            return 0.0;
                        } else {
                            return detail::sample(s, grid.v(i), grid.w(j));
                        }
                    },
                    ic.shape);
            }
        }
    }
    for (std::size_t k = 0; k < p.size(); ++k) {
        if (p[k] < 0.0 || !std::isfinite(p[k])) {
            throw Error(ErrorCode::NegativeInitial, "initial density is negative or non-finite at node " +
                                                        std::to_string(k));
        }
    }
    for (int j = 0; j <= grid.n_w(); ++j) {
        p[static_cast<std::size_t>(j) * (nv + 1) + nv] = 0.0;
    }
    if (ic.normalize) {
        const double mass = grid.dv() * grid.dw() * compensated_sum(p);
        if (!(mass > 0.0)) {
            throw Error(ErrorCode::InvalidArgument, "cannot normalize a zero initial density");
        }
        for (double& x : p) {
            x /= mass;
        }
    }
    return DensityState(grid, std::move(p), a);
}

}  // namespace nnlif
