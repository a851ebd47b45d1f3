// Acceptance run: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "nnlif/criteria.hpp"
#include "nnlif/experiments.hpp"
#include "nnlif/quasisteady.hpp"
#include "nnlif/stepper.hpp"
#include "oracle.hpp"

namespace {

using namespace nnlif;
using criteria::Verdict;

Verdict mass() {
    std::vector<RunSummary> runs;
    for (auto variant : {SchemeVariant::si(), SchemeVariant::fi()}) {
        auto cfg = presets::orders(0.2);
        cfg.variant = variant;
        const auto grid = cfg.grid();
        runs.push_back(
            run(init_density(grid, cfg.initial, cfg.coeffs.a), grid, cfg.coeffs, cfg.variant, {1 << 30, {}}).summary);
    }
    auto v = criteria::mass_conservation(runs);
    v.detail = "SI, FI 200 steps; " + v.detail;
    return v;
}

struct ApRuns {
    std::vector<ApCurve> fi;
    std::vector<ApCurve> si;
};

ApRuns ap_runs(int threads) {
    ApRuns r;
    for (auto variant : {SchemeVariant::fi(), SchemeVariant::si()}) {
        auto base = presets::ap(1e-1, 5e-4, variant);
        base.step_options.positivity = PositivityPolicy::Warn;
        auto curves = ap_sweep(base, default_ap_epsilons(), 10, threads);
        (variant.kind == SchemeVariant::Kind::FI ? r.fi : r.si) = std::move(curves);
    }
    return r;
}

Verdict positivity(const ApRuns& ap) {
    std::vector<RunSummary> runs;
    for (const auto& c : ap.fi) runs.push_back(c.summary);
    for (const auto& c : ap.si) runs.push_back(c.summary);
    auto v = criteria::positivity(runs);
    v.detail = "FI and SI, eps 1e-1..1e-7, dt 5e-4, T 0.3; " + v.detail;
    return v;
}

std::vector<OrderStudy> orders(double t_max, int threads) {
    std::vector<OrderStudy> out;
    for (auto d : {Direction::V, Direction::W, Direction::T}) {
        out.push_back(order_study(presets::orders(t_max), d, default_coarse_step(d), 5, threads));
    }
    return out;
}

Verdict ap(const ApRuns& r) {
    const auto decay = criteria::ap_decay(r.fi);
    const auto plateau = criteria::ap_plateau(r.si, r.fi);
    return {decay.pass && plateau.pass, decay.detail + (decay.pass ? "" : " FAIL") + "; " + plateau.detail +
                                            (plateau.pass ? "" : " FAIL")};
}

Verdict oracles() {
    std::mt19937_64 rng(20240607);
    double kernel = 0.0, solve = 0.0;
    const int instances = 200;
    for (int k = 0; k < instances; ++k) {
        const auto in = oracle::random_instance(rng);
        kernel = std::max(kernel, oracle::kernel_error(in));
        std::uniform_real_distribution<double> bd(0.0, 1.0);
        std::vector<double> b(in.grid.n_v());
        for (auto& x : b) x = bd(rng);
        solve = std::max(solve, oracle::solve_error(in, b));
    }
    double residual = 0.0;
    for (int k = 0; k < instances; ++k) {
        const auto grid = oracle::random_grid(rng);
        CoefficientFns coeffs;
        std::uniform_real_distribution<double> u(0.0, 1.0);
        coeffs.a = 0.5 + u(rng);
        coeffs.input = ScalarFn::constant(2.0 * u(rng) - 1.0);
        coeffs.transfer = ScalarFn::bounded_sigmoid(1.0 + u(rng));
        std::vector<double> H(grid.n_w() + 1);
        for (auto& h : H) h = u(rng);
        const auto qs = quasi_steady(H, grid, coeffs);
        residual = std::max(residual, oracle::quasi_steady_residual(qs, grid, coeffs, coeffs.input));
    }
    const double tol = 1e-10;
    return {kernel <= tol && solve <= tol && residual <= tol,
            std::to_string(instances) + " instances; kernel " + criteria::fmt(kernel, "%.2e") + ", solve " +
                criteria::fmt(solve, "%.2e") + ", quasi-steady flux residual " + criteria::fmt(residual, "%.2e") +
                " (tol 1e-10)"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance criteria"};
    int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);

    int failures = 0;
    const auto report = [&](int id, const char* name, const std::function<Verdict()>& check) {
        const auto start = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (!v.pass) ++failures;
        std::printf("criterion %d %s: %s | %s (%.1fs)\n", id, v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
        std::fflush(stdout);
    };

    ApRuns ap_result;
    bool ap_done = false;
    const auto get_ap = [&]() -> const ApRuns& {
        if (!ap_done) {
            ap_result = ap_runs(threads);
            ap_done = true;
        }
        return ap_result;
    };

    report(1, "mass conservation", mass);
    report(2, "positivity", [&] { return positivity(get_ap()); });
    report(3, "convergence orders T=0.1", [&] { return criteria::orders(orders(0.1, threads)); });
    report(4, "AP decay (FI) and plateau (SI)", [&] { return ap(get_ap()); });
    report(5, "recognition matrix", [&] { return criteria::recognition(inhibitory_recognition(false, threads)); });
    report(6, "excitatory scenarios", [] {
        return criteria::excitatory(excitatory_scenario(presets::Scenario::Steady),
                                    excitatory_scenario(presets::Scenario::Unsteady));
    });
    report(7, "oracle equivalence", oracles);
    report(8, "T=2.5 orders finite", [&] { return criteria::finite_orders(orders(2.5, threads)); });

    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
