#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#include "nnlif/error.hpp"
#include "nnlif/functions.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/model.hpp"
#include "nnlif/numeric.hpp"
#include "nnlif/quasisteady.hpp"
#include "nnlif/stepper.hpp"

namespace nnlif {

/// Everything one trajectory needs: domain, step sizes, coefficients,
/// initial data and scheme.
struct ModelConfig {
    Domain domain;
    double dv = 0.1;
    double dw = 0.01;
    double dt = 1e-3;
    CoefficientFns coeffs;
    InitialCondition initial;
    SchemeVariant variant;
    StepOptions step_options;

    GridSpec grid() const { return GridSpec::from_steps(domain, dv, dw, dt); }
};

/// Runs fn(0..count-1) on up to `threads` workers. Each index is an
/// independent job; the first exception is rethrown after all workers stop.
inline void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    threads = std::clamp(threads, 1, count);
    if (threads == 1) {
        for (int k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (int k = next++; k < count; k = next++) {
                try {
                    fn(k);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Presets

namespace presets {

/// Order-of-accuracy base: a = 1, eps = 0.5, sigma = Nbar, I = 0, sine window.
inline ModelConfig orders(double t_max = 0.1) {
    ModelConfig c;
    c.domain = {-4.0, 2.0, 1.0, -1.1, 0.1, t_max};
    c.dv = 0.1;
    c.dw = 0.01;
    c.dt = 1e-3;
    c.coeffs.a = 1.0;
    c.coeffs.epsilon = 0.5;
    return c;
}

/// AP test: T = 0.3, dv = 0.1, dw = 0.01, I(w) = exp(-(10w+5)^2) / 2.
inline ModelConfig ap(double epsilon, double dt, SchemeVariant variant) {
    ModelConfig c;
    c.domain = {-4.0, 2.0, 1.0, -1.1, 0.1, 0.3};
    c.dv = 0.1;
    c.dw = 0.01;
    c.dt = dt;
    c.coeffs.epsilon = epsilon;
    c.coeffs.input = ScalarFn::gaussian(0.5, 10.0, 5.0);
    c.variant = variant;
    return c;
}

/// Inhibitory learning phase: eps = 0.1, T = 5, dt = 0.005, K = -1{w <= 0}.
inline ModelConfig learning(const ScalarFn& input) {
    ModelConfig c;
    c.domain = {-4.0, 2.0, 1.0, -1.1, 0.1, 5.0};
    c.dv = 0.1;
    c.dw = 0.01;
    c.dt = 0.005;
    c.coeffs.epsilon = 0.1;
    c.coeffs.input = input;
    c.coeffs.learning = ScalarFn::indicator(-1.0, -std::numeric_limits<double>::infinity(), 0.0);
    return c;
}

/// psi_i(10 w + 5) + 1
inline ScalarFn inhibitory_input(int i) { return ScalarFn::hermite_input(i, 10.0, 5.0, 1.0); }

/// psi_i(10 w - 5) + 1
inline ScalarFn excitatory_input(int i) { return ScalarFn::hermite_input(i, 10.0, -5.0, 1.0); }

enum class Scenario { Steady, Unsteady };

inline std::string_view to_string(Scenario s) { return s == Scenario::Steady ? "steady" : "unsteady"; }

/// Excitatory runs: I = 1, eps = 0.2, K = 1, sigma = k Nbar / (1 + Nbar),
/// unit-mass sine window on 0 < w < 1. Steady: k = 1, dt = 5e-3, T = 5.
/// Unsteady: k = 3, dt = 1e-3, T = 1 on a wider weight range.
inline ModelConfig excitatory(Scenario s) {
    ModelConfig c;
    const bool steady = s == Scenario::Steady;
    c.domain = {-4.0, 2.0, 1.0, -0.1, steady ? 1.5 : 4.0, steady ? 5.0 : 1.0};
    c.dv = 0.1;
    c.dw = 0.01;
    c.dt = steady ? 5e-3 : 1e-3;
    c.coeffs.epsilon = 0.2;
    c.coeffs.input = ScalarFn::constant(1.0);
    c.coeffs.learning = ScalarFn::constant(1.0);
    c.coeffs.transfer = ScalarFn::bounded_sigmoid(steady ? 1.0 : 3.0);
    c.initial.shape = init::SineWindow{-1.0, 1.0, 0.0, 1.0};
    c.initial.normalize = true;
    return c;
}

}  // namespace presets

// ---------------------------------------------------------------------------
// Fitting helpers

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int points = 0;
};

/// Least-squares line y = slope x + intercept with coefficient of determination.
inline LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
    LinearFit f;
    f.points = static_cast<int>(std::min(x.size(), y.size()));
    if (f.points < 2) return f;
    const double n = f.points;
    double mx = 0.0, my = 0.0;
    for (int k = 0; k < f.points; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (int k = 0; k < f.points; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    if (sxx == 0.0) return f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (int k = 0; k < f.points; ++k) {
        const double r = y[k] - (f.slope * x[k] + f.intercept);
        ss_res += r * r;
    }
    f.r2 = syy > 0.0 ? 1.0 - ss_res / syy : 0.0;
    return f;
}

/// Shape diagnostics of a firing profile against a triangle N ~ orientation * w.
struct TriangleFit {
    double support_left = std::numeric_limits<double>::quiet_NaN();
    double support_right = std::numeric_limits<double>::quiet_NaN();
    LinearFit fit;
};

/// Fits N against orientation * w over the nodes strictly inside the support
/// (threshold rel * max N). orientation = -1 for inhibitory, +1 for excitatory.
inline TriangleFit triangle_fit(std::span<const double> N, const GridSpec& grid, double orientation,
                                double rel = 1e-6) {
    TriangleFit t;
    const auto edges = support_edges(N, grid, rel);
    t.support_left = edges.left;
    t.support_right = edges.right;
    if (std::isnan(edges.left)) return t;
    std::vector<double> x, y;
    for (std::size_t j = 0; j < N.size(); ++j) {
        const double w = grid.w(static_cast<int>(j));
        if (w > edges.left && w < edges.right) {
            x.push_back(orientation * w);
            y.push_back(N[j]);
        }
    }
    t.fit = linear_fit(x, y);
    return t;
}

// ---------------------------------------------------------------------------
// Order studies

enum class Direction { V, W, T };

inline std::string_view to_string(Direction d) {
    switch (d) {
        case Direction::V: return "v";
        case Direction::W: return "w";
        case Direction::T: return "t";
    }
    return "?";
}

struct OrderStudy {
    Direction direction = Direction::V;
    double t_max = 0.0;
    std::vector<double> steps;     ///< h, h/2, ... (one per run)
    std::vector<double> diff_l1;   ///< ||w_h - w_{h/2}||_1, one per consecutive pair
    std::vector<double> diff_l2;
    std::vector<double> order_l1;  ///< log2 of consecutive difference ratios
    std::vector<double> order_l2;
};

/// Runs `levels` nested resolutions halving the step in `direction` from
/// `coarse_step`; all other steps come from `base`. diff_l1[k] compares
/// levels k and k+1 at the nodes of grid k, weighted by its cell area.
inline OrderStudy order_study(const ModelConfig& base, Direction direction, double coarse_step, int levels = 5,
                              int threads = 1) {
    if (levels < 3) {
        throw Error(ErrorCode::InvalidArgument, "order study needs at least three levels");
    }
    OrderStudy st;
    st.direction = direction;
    st.t_max = base.domain.t_max;
    std::vector<ModelConfig> cfgs(levels, base);
    for (int k = 0; k < levels; ++k) {
        const double h = coarse_step / static_cast<double>(1 << k);
        st.steps.push_back(h);
        switch (direction) {
            case Direction::V: cfgs[k].dv = h; break;
            case Direction::W: cfgs[k].dw = h; break;
            case Direction::T: cfgs[k].dt = h; break;
        }
    }
    std::vector<GridSpec> grids;
    for (const auto& c : cfgs) grids.push_back(c.grid());
    std::vector<DensityState> finals(levels);
    parallel_for(levels, threads, [&](int k) {
        const auto& c = cfgs[k];
        finals[k] = run(init_density(grids[k], c.initial, c.coeffs.a), grids[k], c.coeffs, c.variant, {1 << 30, {}},
                        c.step_options)
                        .final_state;
    });

    // Difference of levels a and a+1 sampled on the nodes of level `on` (on <= a).
    const auto difference = [&](int a, int on) {
        const GridSpec& g = grids[on];
        const int sa = 1 << (a - on);
        const int sb = 1 << (a + 1 - on);
        const int sv_a = direction == Direction::V ? sa : 1;
        const int sv_b = direction == Direction::V ? sb : 1;
        const int sw_a = direction == Direction::W ? sa : 1;
        const int sw_b = direction == Direction::W ? sb : 1;
        std::vector<double> abs_diff, sq_diff;
        abs_diff.reserve(g.node_count());
        sq_diff.reserve(g.node_count());
        for (int j = 0; j <= g.n_w(); ++j) {
            for (int i = 0; i <= g.n_v(); ++i) {
                const double d = finals[a](i * sv_a, j * sw_a) - finals[a + 1](i * sv_b, j * sw_b);
                abs_diff.push_back(std::abs(d));
                sq_diff.push_back(d * d);
            }
        }
        const double cell = g.dv() * g.dw();
        return std::pair{cell * compensated_sum(abs_diff), std::sqrt(cell * compensated_sum(sq_diff))};
    };
    for (int k = 0; k + 1 < levels; ++k) {
        const auto [l1, l2] = difference(k, k);
        st.diff_l1.push_back(l1);
        st.diff_l2.push_back(l2);
    }
    for (std::size_t k = 0; k + 1 < st.diff_l1.size(); ++k) {
        st.order_l1.push_back(std::log2(st.diff_l1[k] / st.diff_l1[k + 1]));
        st.order_l2.push_back(std::log2(st.diff_l2[k] / st.diff_l2[k + 1]));
    }
    return st;
}

/// Coarsest step of each direction in the published ladders.
inline double default_coarse_step(Direction d) {
    switch (d) {
        case Direction::V: return 0.2;
        case Direction::W: return 0.04;
        case Direction::T: return 2e-3;
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// Asymptotic-preserving sweeps

struct ApCurve {
    double epsilon = 0.0;
    double dt = 0.0;
    SchemeVariant::Kind variant = SchemeVariant::Kind::SI;
    std::vector<double> t;
    std::vector<double> distance;  ///< dv dw sum |p^m - P^{H^m}|
    int quasi_steady_failures = 0;
    RunSummary summary;

    double final_distance() const { return distance.empty() ? 0.0 : distance.back(); }
};

/// Distance of the trajectory to its discrete quasi-steady state at every
/// output point (stride steps apart, plus the last step).
inline ApCurve ap_curve(const ModelConfig& cfg, int stride = 10, const QuasiSteadyOptions& qs_opts = {}) {
    const auto grid = cfg.grid();
    ApCurve curve;
    curve.epsilon = cfg.coeffs.epsilon;
    curve.dt = cfg.dt;
    curve.variant = cfg.variant.kind;
    const auto observer = [&](const DensityState& s, double t) {
        const auto qs = quasi_steady(s, grid, cfg.coeffs, qs_opts);
        if (!qs.converged) curve.quasi_steady_failures += 1;
        curve.t.push_back(t);
        curve.distance.push_back(ap_distance(s, qs, grid));
    };
    auto res = run(init_density(grid, cfg.initial, cfg.coeffs.a), grid, cfg.coeffs, cfg.variant, {stride, {}},
                   cfg.step_options, observer);
    curve.summary = res.summary;
    return curve;
}

inline std::vector<double> default_ap_epsilons() { return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}; }

/// One curve per epsilon; everything else (dt, variant, grid) from `base`.
inline std::vector<ApCurve> ap_sweep(const ModelConfig& base, const std::vector<double>& epsilons, int stride = 10,
                                     int threads = 1) {
    std::vector<ApCurve> curves(epsilons.size());
    parallel_for(static_cast<int>(epsilons.size()), threads, [&](int k) {
        ModelConfig cfg = base;
        cfg.coeffs.epsilon = epsilons[k];
        curves[k] = ap_curve(cfg, stride);
    });
    return curves;
}

inline std::vector<ApCurve> ap_sweep(SchemeVariant variant, double dt, const std::vector<double>& epsilons,
                                     int stride = 10, int threads = 1) {
    std::vector<ApCurve> curves(epsilons.size());
    parallel_for(static_cast<int>(epsilons.size()), threads,
                 [&](int k) { curves[k] = ap_curve(presets::ap(epsilons[k], dt, variant), stride); });
    return curves;
}

// ---------------------------------------------------------------------------
// Learning and testing

struct LearningResult {
    std::vector<double> H;         ///< weight marginal at T
    double nbar = 0.0;
    double equilibrium_proxy = 0;  ///< dw sum |H(T) - H(T - 10 dt)|
    DensityState final_state;
    RunSummary summary;
};

/// Learning phase: runs the configured scheme to T_max with the learned input.
inline LearningResult learn(const ModelConfig& cfg) {
    const auto grid = cfg.grid();
    LearningResult out;
    const int lag_step = std::max(0, grid.n_t() - 10);
    std::vector<double> lagged;
    const auto observer = [&](const DensityState& s, double) {
        if (s.step() == lag_step) lagged = s.observables().H;
    };
    auto res = run(init_density(grid, cfg.initial, cfg.coeffs.a), grid, cfg.coeffs, cfg.variant, {1, {}},
                   cfg.step_options, observer);
    out.H = res.final_state.observables().H;
    out.nbar = res.final_state.Nbar();
    std::vector<double> diff(out.H.size());
    for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = std::abs(out.H[j] - lagged[j]);
    out.equilibrium_proxy = grid.dw() * compensated_sum(diff);
    out.final_state = std::move(res.final_state);
    out.summary = res.summary;
    return out;
}

struct ReactionResult {
    std::vector<double> N;  ///< N*_{I,J}
    double nbar = 0.0;
    bool converged = false;
    int iterations = 0;
    TriangleFit triangle;
};

/// Testing phase: quasi-steady state of the learned marginal under the test input.
inline ReactionResult react(const LearningResult& learned, const ModelConfig& cfg, const ScalarFn& test_input,
                            double orientation = -1.0) {
    const auto grid = cfg.grid();
    QuasiSteadyOptions opts;
    opts.input_override = test_input;
    opts.nbar_guess = learned.nbar;
    const auto qs = quasi_steady(learned.H, grid, cfg.coeffs, opts);
    ReactionResult r;
    r.N = qs.N;
    r.nbar = qs.nbar;
    r.converged = qs.converged;
    r.iterations = qs.iterations;
    r.triangle = triangle_fit(r.N, grid, orientation);
    return r;
}

struct RecognitionMatrix {
    int size = 0;
    std::vector<int> learned_rows;       ///< learn indices that were run
    std::vector<LearningResult> learned;  ///< parallel to learned_rows
    std::vector<std::optional<ReactionResult>> cells;  ///< size*size, row = learn index

    const std::optional<ReactionResult>& cell(int i, int j) const { return cells[i * size + j]; }
};

/// Learn each input once, then test it against every input (or only itself
/// when diagonal_only). make_input(i) yields the i-th candidate input.
inline RecognitionMatrix recognition_matrix(const std::function<ModelConfig(const ScalarFn&)>& make_config,
                                            const std::function<ScalarFn(int)>& make_input, int size,
                                            bool diagonal_only, double orientation, int threads = 1) {
    RecognitionMatrix m;
    m.size = size;
    m.cells.assign(static_cast<std::size_t>(size) * size, std::nullopt);
    for (int i = 0; i < size; ++i) m.learned_rows.push_back(i);
    m.learned.resize(size);
    parallel_for(size, threads, [&](int i) { m.learned[i] = learn(make_config(make_input(i))); });
    std::vector<std::pair<int, int>> jobs;
    for (int i = 0; i < size; ++i) {
        for (int j = 0; j < size; ++j) {
            if (!diagonal_only || i == j) jobs.emplace_back(i, j);
        }
    }
    parallel_for(static_cast<int>(jobs.size()), threads, [&](int k) {
        const auto [i, j] = jobs[k];
        m.cells[i * size + j] = react(m.learned[i], make_config(make_input(i)), make_input(j), orientation);
    });
    return m;
}

inline RecognitionMatrix inhibitory_recognition(bool diagonal_only, int threads = 1) {
    return recognition_matrix(presets::learning, presets::inhibitory_input, 5, diagonal_only, -1.0, threads);
}

// ---------------------------------------------------------------------------
// Excitatory scenarios

enum class Classification { Converged, Expanding, Undetermined };

inline std::string_view to_string(Classification c) {
    switch (c) {
        case Classification::Converged: return "CONVERGED";
        case Classification::Expanding: return "EXPANDING";
        case Classification::Undetermined: return "UNDETERMINED";
    }
    return "?";
}

struct ClassifierOptions {
    int lag_steps = 10;             ///< delta = lag_steps * dt
    double h_tolerance = 1e-2;      ///< on sum |H(T) - H(T - delta)| / sum H(T)
    double nbar_tolerance = 1e-3;   ///< on |Nbar(T) - Nbar(T - delta)| / max(Nbar(T), 1)
    double triangle_r2 = 0.95;
};

struct ExcitatoryResult {
    presets::Scenario scenario = presets::Scenario::Steady;
    RunResult run;
    std::vector<double> H_lagged;
    double h_change = 0.0;     ///< relative, see ClassifierOptions
    double nbar_change = 0.0;  ///< relative, see ClassifierOptions
    TriangleFit triangle;
    bool support_nondecreasing = false;  ///< right edge over the final third
    double early_advance = 0.0;          ///< edge advance over the first half of the final third
    double late_advance = 0.0;           ///< ... and over the second half
    bool nbar_increasing = false;        ///< Nbar nondecreasing and rising over the final third
    bool support_reaches_boundary = false;
    Classification classification = Classification::Undetermined;
};

inline ExcitatoryResult classify_trajectory(ExcitatoryResult r, const GridSpec& grid,
                                            const ClassifierOptions& opts = {}) {
    const auto& fin = r.run.final_state;
    const auto& H = fin.observables().H;
    std::vector<double> diff(H.size());
    for (std::size_t j = 0; j < H.size(); ++j) diff[j] = std::abs(H[j] - r.H_lagged[j]);
    const double h_total = compensated_sum(H);
    r.h_change = h_total > 0.0 ? compensated_sum(diff) / h_total : 0.0;
    const auto& traj = r.run.trajectory;
    const std::size_t lag = static_cast<std::size_t>(opts.lag_steps);
    if (traj.size() > lag) {
        r.nbar_change = std::abs(traj.back().nbar - traj[traj.size() - 1 - lag].nbar) /
                        std::max(traj.back().nbar, 1.0);
    }
    r.triangle = triangle_fit(fin.observables().N, grid, 1.0);
    r.support_reaches_boundary = r.run.summary.boundary_support_steps > 0;

    const std::size_t n = traj.size();
    const std::size_t start = n - n / 3;
    const std::size_t mid = start + (n - start) / 2;
    r.support_nondecreasing = n >= 3;
    r.nbar_increasing = n >= 3;
    for (std::size_t k = start + 1; k < n; ++k) {
        if (!(traj[k].w_support_right >= traj[k - 1].w_support_right)) r.support_nondecreasing = false;
        if (!(traj[k].nbar >= traj[k - 1].nbar)) r.nbar_increasing = false;
    }
    if (n >= 3) {
        r.early_advance = traj[mid].w_support_right - traj[start].w_support_right;
        r.late_advance = traj[n - 1].w_support_right - traj[mid].w_support_right;
        r.nbar_increasing = r.nbar_increasing && traj[n - 1].nbar > traj[start].nbar;
    }

    const bool settled = r.h_change <= opts.h_tolerance && r.nbar_change <= opts.nbar_tolerance;
    const bool expanding = r.support_nondecreasing && r.late_advance > r.early_advance && r.early_advance >= 0.0 &&
                           r.nbar_increasing;
    if (settled) {
        r.classification = Classification::Converged;
    } else if (expanding) {
        r.classification = Classification::Expanding;
    }
    return r;
}

inline ExcitatoryResult excitatory_run(const ModelConfig& cfg, presets::Scenario scenario,
                                       const ClassifierOptions& opts = {},
                                       const std::vector<double>& snapshot_times = {}) {
    const auto grid = cfg.grid();
    ExcitatoryResult r;
    r.scenario = scenario;
    const int lag_step = std::max(0, grid.n_t() - opts.lag_steps);
    StepOptions step_opts = cfg.step_options;
    const auto observer = [&](const DensityState& s, double) {
        if (s.step() == lag_step) r.H_lagged = s.observables().H;
    };
    r.run = run(init_density(grid, cfg.initial, cfg.coeffs.a), grid, cfg.coeffs, cfg.variant, {1, snapshot_times},
                step_opts, observer);
    return classify_trajectory(std::move(r), grid, opts);
}

inline ExcitatoryResult excitatory_scenario(presets::Scenario scenario, const ClassifierOptions& opts = {}) {
    return excitatory_run(presets::excitatory(scenario), scenario, opts);
}

}  // namespace nnlif
