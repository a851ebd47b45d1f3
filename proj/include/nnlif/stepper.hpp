#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nnlif/error.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/maxwellian.hpp"
#include "nnlif/model.hpp"
#include "nnlif/numeric.hpp"
#include "nnlif/transport_w.hpp"

namespace nnlif {

/// v-SI builds the Maxwellian from Nbar^m; v-FI from Nbar^{m+1}, found by
/// fixed-point iteration on the total firing rate.
struct SchemeVariant {
    enum class Kind { SI, FI };

    Kind kind = Kind::SI;
    double fixpoint_tol = 1e-12;  ///< absolute, on |Nbar^(k+1) - Nbar^(k)|
    int max_iterations = 100;

    static SchemeVariant si() { return {}; }
    static SchemeVariant fi(double tol = 1e-12, int max_iterations = 100) {
        return {Kind::FI, tol, max_iterations};
    }
};

struct StepOptions {
    PositivityPolicy positivity = PositivityPolicy::Abort;
    double exponent_guard = kDefaultExponentGuard;
};

struct StepReport {
    double mass_before = 0.0;
    double mass_after = 0.0;
    double min_density = 0.0;
    double max_density = 0.0;
    double nbar_before = 0.0;
    double nbar_after = 0.0;
    int iterations = 0;           ///< column-solve rounds (1 for v-SI)
    double fixpoint_residual = 0.0;
    bool converged = true;        ///< false when v-FI stopped at max_iterations
    PositivityReport positivity;
    double wall_seconds = 0.0;

    double relative_mass_drift() const {
        return mass_before > 0.0 ? std::abs(mass_after - mass_before) / mass_before : std::abs(mass_after);
    }
};

namespace detail {

/// One implicit v-transport solve for every column, Maxwellian at nbar.
inline void solve_columns(std::span<const double> p_star, std::span<double> out, const GridSpec& grid,
                          const CoefficientFns& coeffs, double nbar, double exponent_guard) {
    const int nv = grid.n_v();
    const double lambda = coeffs.a * grid.dt() / (grid.dv() * grid.dv());
    std::vector<double> rhs(nv);
    for (int j = 0; j <= grid.n_w(); ++j) {
        const std::size_t off = static_cast<std::size_t>(j) * (nv + 1);
        const auto col = build_column(grid, coeffs, j, nbar, exponent_guard);
        const auto mat = assemble_matrix(col, lambda, coeffs.epsilon);
        for (int i = 0; i < nv; ++i) rhs[i] = coeffs.epsilon * p_star[off + i];
        const auto x = solve_shifted(mat, rhs);
        std::copy(x.begin(), x.end(), out.begin() + static_cast<std::ptrdiff_t>(off));
        out[off + nv] = 0.0;
    }
}

inline double total_firing_rate(std::span<const double> p, const GridSpec& grid, double a) {
    const int nv = grid.n_v();
    std::vector<double> N(grid.n_w() + 1);
    for (int j = 0; j <= grid.n_w(); ++j) {
        N[j] = a * p[static_cast<std::size_t>(j) * (nv + 1) + nv - 1] / grid.dv();
    }
    return std::max(0.0, grid.dw() * compensated_sum(N));
}

}  // namespace detail

/// Advances one time step: explicit Godunov w-convection at level m, then the
/// per-column implicit v-transport with the reinjection always at level m+1.
inline StepReport step(DensityState& state, const GridSpec& grid, const CoefficientFns& coeffs,
                       const SchemeVariant& variant, const StepOptions& opts = {}) {
    const auto start = std::chrono::steady_clock::now();
    StepReport rep;
    rep.mass_before = state.mass(grid);
    rep.nbar_before = state.Nbar();

    const auto fluxes = build_w_fluxes(state, grid, coeffs);
    const auto p_star = convection_step(state, fluxes, grid);
    rep.positivity = positivity_check(p_star, grid, fluxes.velocity, opts.positivity);

    std::vector<double> next(p_star.size(), 0.0);
    if (variant.kind == SchemeVariant::Kind::SI) {
        detail::solve_columns(p_star, next, grid, coeffs, rep.nbar_before, opts.exponent_guard);
        rep.iterations = 1;
    } else {
        double nbar = rep.nbar_before;
        rep.converged = false;
        for (int k = 1; k <= variant.max_iterations; ++k) {
            detail::solve_columns(p_star, next, grid, coeffs, nbar, opts.exponent_guard);
            const double updated = detail::total_firing_rate(next, grid, coeffs.a);
            rep.iterations = k;
            rep.fixpoint_residual = std::abs(updated - nbar);
            // An unchanged sigma means the next round would reproduce this iterate exactly.
            const bool same_operator = coeffs.transfer(updated) == coeffs.transfer(nbar);
            if (rep.fixpoint_residual <= variant.fixpoint_tol || same_operator) {
                rep.converged = true;
                break;
            }
            nbar = updated;
        }
    }

    std::copy(next.begin(), next.end(), state.values().begin());
    state.refresh(grid, coeffs.a);
    state.set_step(state.step() + 1);

    rep.mass_after = state.mass(grid);
    rep.nbar_after = state.Nbar();
    rep.min_density = state.min_value();
    rep.max_density = state.max_value();
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

inline StepReport step_si(DensityState& state, const GridSpec& grid, const CoefficientFns& coeffs,
                          const StepOptions& opts = {}) {
    return step(state, grid, coeffs, SchemeVariant::si(), opts);
}

inline StepReport step_fi(DensityState& state, const GridSpec& grid, const CoefficientFns& coeffs,
                          const SchemeVariant& variant, const StepOptions& opts = {}) {
    SchemeVariant fi = variant;
    fi.kind = SchemeVariant::Kind::FI;
    return step(state, grid, coeffs, fi, opts);
}

// ---------------------------------------------------------------------------
// Trajectories

/// Leftmost/rightmost w_j with N_j above theta = rel * max_j N_j (NaN if N == 0).
struct SupportEdges {
    double left = std::numeric_limits<double>::quiet_NaN();
    double right = std::numeric_limits<double>::quiet_NaN();
};

inline SupportEdges support_edges(std::span<const double> N, const GridSpec& grid, double rel = 1e-6) {
    SupportEdges e;
    const double peak = N.empty() ? 0.0 : *std::max_element(N.begin(), N.end());
    if (!(peak > 0.0)) return e;
    const double theta = rel * peak;
    for (std::size_t j = 0; j < N.size(); ++j) {
        if (N[j] > theta) {
            if (std::isnan(e.left)) e.left = grid.w(static_cast<int>(j));
            e.right = grid.w(static_cast<int>(j));
        }
    }
    return e;
}

struct OutputSpec {
    int stride = 1;
    std::vector<double> snapshot_times;
};

struct TrajectoryRow {
    int step = 0;
    double t = 0.0;
    double nbar = 0.0;
    double mass = 0.0;
    double min_p = 0.0;
    double w_support_left = 0.0;
    double w_support_right = 0.0;
};

struct Snapshot {
    int step = 0;
    double t = 0.0;
    std::vector<double> p;
    Observables obs;
};

struct RunSummary {
    int steps = 0;
    double max_relative_mass_drift = 0.0;
    double worst_relative_min = 0.0;  ///< min over steps of min_p / max_p
    int max_fixpoint_iterations = 0;
    int fixpoint_failures = 0;
    int positivity_warnings = 0;
    double max_courant = 0.0;
    int boundary_support_steps = 0;   ///< steps with H_0 or H_{n_w} above 1e-8
    double initial_mass = 0.0;
    double final_mass = 0.0;
};

struct RunResult {
    DensityState final_state;
    std::vector<TrajectoryRow> trajectory;
    std::vector<Snapshot> snapshots;
    RunSummary summary;
};

/// Called at every output point (step 0, every stride, and the last step).
using RunObserver = std::function<void(const DensityState&, double t)>;

inline TrajectoryRow trajectory_row(const DensityState& s, const GridSpec& grid) {
    const auto edges = support_edges(s.observables().N, grid);
    return {s.step(), grid.t(s.step()), s.Nbar(), s.mass(grid), s.min_value(), edges.left, edges.right};
}

/// Drives n_t steps from the initial state.
inline RunResult run(DensityState initial, const GridSpec& grid, const CoefficientFns& coeffs,
                     const SchemeVariant& variant, const OutputSpec& output = {}, const StepOptions& opts = {},
                     const RunObserver& observer = {}) {
    coeffs.validate();
    if (output.stride < 1) {
        throw Error(ErrorCode::InvalidArgument, "output stride must be at least 1");
    }
    RunResult res;
    res.final_state = std::move(initial);
    auto& s = res.final_state;
    res.summary.initial_mass = s.mass(grid);

    std::vector<int> snapshot_steps;
    for (double t : output.snapshot_times) {
        snapshot_steps.push_back(grid.dt() > 0.0 ? static_cast<int>(std::lround(t / grid.dt())) : 0);
    }
    const auto emit = [&](bool force) {
        const int m = s.step();
        if (force || m % output.stride == 0) {
            res.trajectory.push_back(trajectory_row(s, grid));
            if (observer) observer(s, grid.t(m));
        }
        if (std::find(snapshot_steps.begin(), snapshot_steps.end(), m) != snapshot_steps.end()) {
            res.snapshots.push_back({m, grid.t(m), std::vector<double>(s.values().begin(), s.values().end()),
                                     s.observables()});
        }
    };

    emit(true);
    const int nw = grid.n_w();
    for (int m = 0; m < grid.n_t(); ++m) {
        StepReport rep;
        try {
            rep = step(s, grid, coeffs, variant, opts);
        } catch (const Error& e) {
            throw Error(e.code(), "step " + std::to_string(m) + ": " + e.message());
        }
        auto& sum = res.summary;
        sum.steps += 1;
        sum.max_relative_mass_drift = std::max(sum.max_relative_mass_drift, rep.relative_mass_drift());
        if (rep.max_density > 0.0) {
            sum.worst_relative_min = std::min(sum.worst_relative_min, rep.min_density / rep.max_density);
        }
        sum.max_fixpoint_iterations = std::max(sum.max_fixpoint_iterations, rep.iterations);
        if (!rep.converged) sum.fixpoint_failures += 1;
        if (rep.positivity.violated) sum.positivity_warnings += 1;
        sum.max_courant = std::max(sum.max_courant, rep.positivity.courant);
        const auto& H = s.observables().H;
        if (H[0] > 1e-8 || H[nw] > 1e-8) sum.boundary_support_steps += 1;
        emit(m + 1 == grid.n_t());
    }
    res.summary.final_mass = s.mass(grid);
    return res;
}

}  // namespace nnlif
