#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnlif/criteria.hpp"
#include "nnlif/experiments.hpp"
#include "nnlif/io/artifacts.hpp"
#include "nnlif/io/config.hpp"
#include "nnlif/quasisteady.hpp"
#include "nnlif/stepper.hpp"

namespace nnlif::io {

namespace fs = std::filesystem;

struct CampaignOptions {
    fs::path out = "out";
    int threads = 1;
    bool dump_matrices = false;
};

// --- default configs for campaigns run without --config ---------------------

inline RunConfig default_config(Campaign c) {
    RunConfig cfg;
    cfg.campaign = c;
    switch (c) {
        case Campaign::Run:
        case Campaign::Orders: cfg.model = presets::orders(); break;
        case Campaign::Ap: cfg.model = presets::ap(1e-1, 5e-4, SchemeVariant::si()); break;
        case Campaign::Learn: cfg.model = presets::learning(ScalarFn::constant(1.0)); break;
        case Campaign::Excitatory:
            cfg.model = presets::excitatory(presets::Scenario::Steady);
            cfg.output.snapshot_times = {0.0, cfg.model.domain.t_max};
            break;
        case Campaign::Steady: cfg.model = presets::learning(ScalarFn::constant(1.0)); break;
    }
    return cfg;
}

inline RunConfig excitatory_config(presets::Scenario s) {
    RunConfig cfg;
    cfg.campaign = Campaign::Excitatory;
    cfg.model = presets::excitatory(s);
    cfg.excitatory.scenario = s;
    cfg.output.snapshot_times = {0.0, cfg.model.domain.t_max};
    return cfg;
}

namespace detail {

inline std::string tag(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

inline json header(const RunConfig& cfg) {
    return {{"config_hash", config_hash(cfg)}, {"config", to_json(cfg)}};
}

inline json verdict_json(const criteria::Verdict& v) { return {{"pass", v.pass}, {"detail", v.detail}}; }

inline json finite_array(const std::vector<double>& xs) {
    json a = json::array();
    for (double x : xs) a.push_back(finite_or_null(x));
    return a;
}

inline json triangle_json(const TriangleFit& t) {
    return {{"support_left", finite_or_null(t.support_left)},
            {"support_right", finite_or_null(t.support_right)},
            {"slope", t.fit.slope},
            {"intercept", t.fit.intercept},
            {"r2", t.fit.r2},
            {"points", t.fit.points}};
}

inline std::string snapshot_name(const std::string& prefix, int step) {
    return prefix + "snapshot_" + std::to_string(step) + ".csv";
}

}  // namespace detail

// --- run ---------------------------------------------------------------------

/// Single trajectory: trajectory.csv, profile.csv, opt-in snapshots, summary.json.
inline json run_campaign(const RunConfig& cfg, const CampaignOptions& opt) {
    const auto& m = cfg.model;
    const auto grid = m.grid();
    auto init = init_density(grid, m.initial, m.coeffs.a);
    if (opt.dump_matrices) {
        write_matrices_csv(opt.out / "matrices.csv", grid, m.coeffs, init.Nbar(), m.step_options.exponent_guard);
    }
    const auto res =
        run(std::move(init), grid, m.coeffs, m.variant, {cfg.output.stride, cfg.output.snapshot_times}, m.step_options);
    write_trajectory_csv(opt.out / "trajectory.csv", res.trajectory);
    write_profile_csv(opt.out / "profile.csv", grid, res.final_state.observables());
    json files = {"trajectory.csv", "profile.csv"};
    json snaps = json::array();
    for (const auto& s : res.snapshots) {
        const auto name = detail::snapshot_name("", s.step);
        write_snapshot_csv(opt.out / name, grid, s.p);
        snaps.push_back({{"step", s.step}, {"t", s.t}, {"file", name}});
        files.push_back(name);
    }
    if (opt.dump_matrices) files.push_back("matrices.csv");
    json doc = detail::header(cfg);
    doc["summary"] = summary_json(res.summary);
    doc["final"] = {{"step", res.final_state.step()},
                    {"t", grid.t(res.final_state.step())},
                    {"Nbar", res.final_state.Nbar()},
                    {"mass", res.final_state.mass(grid)}};
    doc["snapshots"] = snaps;
    doc["files"] = files;
    write_json(opt.out / "summary.json", doc);
    return doc;
}

// --- orders ------------------------------------------------------------------

inline void write_order_csv(const fs::path& path, const OrderStudy& st) {
    CsvWriter csv(path, {"level", "h", "diff_l1", "diff_l2", "order_l1", "order_l2"});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < st.diff_l1.size(); ++k) {
        csv.row(static_cast<int>(k), st.steps[k], st.diff_l1[k], st.diff_l2[k],
                k < st.order_l1.size() ? st.order_l1[k] : nan, k < st.order_l2.size() ? st.order_l2[k] : nan);
    }
}

struct OrdersOutcome {
    std::vector<OrderStudy> studies;
    json doc;
};

/// One study per (horizon, direction): orders_<dir>_T<T>.csv plus orders.json.
/// Bands are checked on the T = 0.1 studies; all studies must be finite.
inline OrdersOutcome orders_campaign(const RunConfig& cfg, const CampaignOptions& opt) {
    OrdersOutcome out;
    json files = json::array();
    json list = json::array();
    std::vector<OrderStudy> short_horizon;
    for (double T : cfg.orders.horizons) {
        ModelConfig base = cfg.model;
        base.domain.t_max = T;
        for (auto d : cfg.orders.directions) {
            auto st = order_study(base, d, cfg.orders.coarse_step(d), cfg.orders.levels, opt.threads);
            const auto name = "orders_" + std::string(to_string(d)) + "_T" + detail::tag(T) + ".csv";
            write_order_csv(opt.out / name, st);
            files.push_back(name);
            const auto band = criteria::order_band(st);
            list.push_back({{"direction", to_string(d)},
                            {"t_max", T},
                            {"steps", st.steps},
                            {"diff_l1", detail::finite_array(st.diff_l1)},
                            {"diff_l2", detail::finite_array(st.diff_l2)},
                            {"order_l1", detail::finite_array(st.order_l1)},
                            {"order_l2", detail::finite_array(st.order_l2)},
                            {"band", {criteria::expected_band(d).lo, criteria::expected_band(d).hi}},
                            {"in_band", band.pass},
                            {"file", name}});
            if (std::abs(T - 0.1) < 1e-12) short_horizon.push_back(st);
            out.studies.push_back(std::move(st));
        }
    }
    json doc = detail::header(cfg);
    doc["studies"] = list;
    json verdicts = {{"finite", detail::verdict_json(criteria::finite_orders(out.studies))}};
    if (!short_horizon.empty()) verdicts["orders_T0.1"] = detail::verdict_json(criteria::orders(short_horizon));
    doc["verdicts"] = verdicts;
    doc["files"] = files;
    write_json(opt.out / "orders.json", doc);
    out.doc = doc;
    return out;
}

// --- ap ----------------------------------------------------------------------

struct ApOutcome {
    std::vector<ApCurve> curves;
    json doc;
};

/// Distance-to-quasi-steady curves for every (variant, dt, epsilon):
/// ap_<variant>_dt<dt>.csv (epsilon, t, distance) plus ap.json.
inline ApOutcome ap_campaign(const RunConfig& cfg, const CampaignOptions& opt) {
    ApOutcome out;
    json files = json::array();
    json list = json::array();
    json verdicts = json::object();
    std::vector<RunSummary> summaries;
    for (auto kind : cfg.ap.variants) {
        const std::string vname = kind == SchemeVariant::Kind::SI ? "SI" : "FI";
        for (double dt : cfg.ap.dts) {
            ModelConfig base = cfg.model;
            base.variant.kind = kind;
            base.dt = dt;
            auto curves = ap_sweep(base, cfg.ap.epsilons, cfg.ap.stride, opt.threads);
            const auto name = "ap_" + vname + "_dt" + detail::tag(dt) + ".csv";
            CsvWriter csv(opt.out / name, {"epsilon", "t", "distance"});
            for (const auto& c : curves) {
                for (std::size_t k = 0; k < c.t.size(); ++k) csv.row(c.epsilon, c.t[k], c.distance[k]);
                list.push_back({{"variant", vname},
                                {"dt", dt},
                                {"epsilon", c.epsilon},
                                {"final_distance", c.final_distance()},
                                {"quasi_steady_failures", c.quasi_steady_failures},
                                {"summary", summary_json(c.summary)}});
                summaries.push_back(c.summary);
            }
            files.push_back(name);
            if (kind == SchemeVariant::Kind::FI) {
                verdicts["decay_FI_dt" + detail::tag(dt)] = detail::verdict_json(criteria::ap_decay(curves));
            }
            out.curves.insert(out.curves.end(), curves.begin(), curves.end());
        }
    }
    for (double dt : cfg.ap.dts) {
        std::vector<ApCurve> si, fi;
        for (const auto& c : out.curves) {
            if (c.dt != dt) continue;
            (c.variant == SchemeVariant::Kind::SI ? si : fi).push_back(c);
        }
        if (!si.empty() && !fi.empty()) {
            verdicts["plateau_SI_dt" + detail::tag(dt)] = detail::verdict_json(criteria::ap_plateau(si, fi));
        }
    }
    verdicts["positivity"] = detail::verdict_json(criteria::positivity(summaries));
    json doc = detail::header(cfg);
    doc["curves"] = list;
    doc["verdicts"] = verdicts;
    doc["files"] = files;
    write_json(opt.out / "ap.json", doc);
    out.doc = doc;
    return out;
}

// --- learn -------------------------------------------------------------------

struct LearnOutcome {
    RecognitionMatrix matrix;
    json doc;
};

/// Learn-then-test matrix: inputs.csv, learned_<i>.csv, cell_<i>_<j>.csv
/// (w, N, H with H the learned marginal) and learn.json.
inline LearnOutcome learn_campaign(const RunConfig& cfg, const CampaignOptions& opt) {
    const bool inhibitory = cfg.learn.family == LearnFamily::Inhibitory;
    const double orientation = inhibitory ? -1.0 : 1.0;
    const auto make_input = inhibitory ? presets::inhibitory_input : presets::excitatory_input;
    const ModelConfig base = cfg.model;
    const auto make_config = [base](const ScalarFn& input) {
        ModelConfig c = base;
        c.coeffs.input = input;
        return c;
    };
    LearnOutcome out;
    out.matrix = recognition_matrix(make_config, make_input, cfg.learn.inputs, cfg.learn.diagonal_only, orientation,
                                    opt.threads);
    const auto& m = out.matrix;
    const auto grid = base.grid();
    json files = json::array();

    std::vector<std::string> header{"w"};
    for (int i = 0; i < m.size; ++i) header.push_back("I_" + std::to_string(i));
    {
        CsvWriter csv(opt.out / "inputs.csv", header);
        for (int j = 0; j <= grid.n_w(); ++j) {
            std::vector<std::string> row{format_double(grid.w(j))};
            for (int i = 0; i < m.size; ++i) row.push_back(format_double(make_input(i)(grid.w(j))));
            csv.row_strings(row);
        }
    }
    files.push_back("inputs.csv");

    json learned = json::array();
    for (int i = 0; i < m.size; ++i) {
        const auto& l = m.learned[i];
        const auto name = "learned_" + std::to_string(i) + ".csv";
        write_profile_csv(opt.out / name, grid, l.final_state.observables());
        files.push_back(name);
        learned.push_back({{"index", i},
                           {"Nbar", l.nbar},
                           {"equilibrium_proxy", l.equilibrium_proxy},
                           {"summary", summary_json(l.summary)},
                           {"file", name}});
    }
    json cells = json::array();
    for (int i = 0; i < m.size; ++i) {
        for (int j = 0; j < m.size; ++j) {
            const auto& c = m.cell(i, j);
            if (!c) continue;
            const auto name = "cell_" + std::to_string(i) + "_" + std::to_string(j) + ".csv";
            write_profile_csv(opt.out / name, grid, c->N, m.learned[i].H);
            files.push_back(name);
            cells.push_back({{"learn", i},
                             {"test", j},
                             {"Nbar", c->nbar},
                             {"converged", c->converged},
                             {"iterations", c->iterations},
                             {"triangle", detail::triangle_json(c->triangle)},
                             {"file", name}});
        }
    }
    json doc = detail::header(cfg);
    doc["orientation"] = orientation;
    doc["learned"] = learned;
    doc["cells"] = cells;
    doc["verdicts"] = {{"recognition", detail::verdict_json(criteria::recognition(m))}};
    doc["files"] = files;
    write_json(opt.out / "learn.json", doc);
    out.doc = doc;
    return out;
}

// --- excitatory --------------------------------------------------------------

inline json excitatory_json(const ExcitatoryResult& r) {
    return {{"scenario", presets::to_string(r.scenario)},
            {"classification", to_string(r.classification)},
            {"h_change", r.h_change},
            {"nbar_change", r.nbar_change},
            {"triangle", detail::triangle_json(r.triangle)},
            {"support_nondecreasing", r.support_nondecreasing},
            {"early_advance", r.early_advance},
            {"late_advance", r.late_advance},
            {"nbar_increasing", r.nbar_increasing},
            {"support_reaches_boundary", r.support_reaches_boundary},
            {"final_Nbar", r.run.final_state.Nbar()},
            {"summary", summary_json(r.run.summary)}};
}

/// One scenario: excitatory_<s>.json, trajectory_<s>.csv, profile_<s>.csv and
/// any configured snapshots (<s>_snapshot_<step>.csv).
inline ExcitatoryResult excitatory_campaign(const RunConfig& cfg, const CampaignOptions& opt) {
    const auto s = cfg.excitatory.scenario;
    const std::string name(presets::to_string(s));
    const auto grid = cfg.model.grid();
    auto r = excitatory_run(cfg.model, s, cfg.excitatory.classifier, cfg.output.snapshot_times);
    json files = json::array();
    write_trajectory_csv(opt.out / ("trajectory_" + name + ".csv"), r.run.trajectory);
    write_profile_csv(opt.out / ("profile_" + name + ".csv"), grid, r.run.final_state.observables());
    files.push_back("trajectory_" + name + ".csv");
    files.push_back("profile_" + name + ".csv");
    json snaps = json::array();
    for (const auto& snap : r.run.snapshots) {
        const auto file = detail::snapshot_name(name + "_", snap.step);
        write_snapshot_csv(opt.out / file, grid, snap.p);
        snaps.push_back({{"step", snap.step}, {"t", snap.t}, {"file", file}});
        files.push_back(file);
    }
    json doc = detail::header(cfg);
    doc["result"] = excitatory_json(r);
    doc["snapshots"] = snaps;
    doc["files"] = files;
    write_json(opt.out / ("excitatory_" + name + ".json"), doc);
    return r;
}

/// Both built-in scenarios plus the combined verdict in excitatory.json.
inline json excitatory_pair(const CampaignOptions& opt) {
    const auto steady_cfg = excitatory_config(presets::Scenario::Steady);
    const auto unsteady_cfg = excitatory_config(presets::Scenario::Unsteady);
    const auto steady = excitatory_campaign(steady_cfg, opt);
    const auto unsteady = excitatory_campaign(unsteady_cfg, opt);
    json doc = {{"config_hashes", {{"steady", config_hash(steady_cfg)}, {"unsteady", config_hash(unsteady_cfg)}}},
                {"steady", excitatory_json(steady)},
                {"unsteady", excitatory_json(unsteady)},
                {"verdicts", {{"excitatory", detail::verdict_json(criteria::excitatory(steady, unsteady))}}},
                {"files", {"excitatory_steady.json", "excitatory_unsteady.json"}}};
    write_json(opt.out / "excitatory.json", doc);
    return doc;
}

// --- steady ------------------------------------------------------------------

/// Quasi-steady state for the configured H (or the initial marginal):
/// profile.csv, snapshot.csv (v, w, P) and steady.json.
inline json steady_campaign(const RunConfig& cfg, const CampaignOptions& opt) {
    const auto& m = cfg.model;
    const auto grid = m.grid();
    const auto init = init_density(grid, m.initial, m.coeffs.a);
    const std::vector<double> H = cfg.steady.H.empty() ? init.observables().H : cfg.steady.H;
    QuasiSteadyOptions qo;
    qo.tolerance = cfg.steady.tolerance;
    qo.max_iterations = cfg.steady.max_iterations;
    qo.input_override = cfg.steady.input_override;
    qo.exponent_guard = m.step_options.exponent_guard;
    qo.nbar_guess = cfg.steady.H.empty() ? init.Nbar() : 0.0;
    const auto qs = quasi_steady(H, grid, m.coeffs, qo);
    write_profile_csv(opt.out / "profile.csv", grid, qs.N, H);
    write_snapshot_csv(opt.out / "snapshot.csv", grid, qs.P);
    json files = {"profile.csv", "snapshot.csv"};
    if (opt.dump_matrices) {
        write_matrices_csv(opt.out / "matrices.csv", grid, m.coeffs, qs.nbar_used, m.step_options.exponent_guard);
        files.push_back("matrices.csv");
    }
    json doc = detail::header(cfg);
    doc["result"] = {{"Nbar", qs.nbar},
                     {"Nbar_used", qs.nbar_used},
                     {"iterations", qs.iterations},
                     {"converged", qs.converged},
                     {"final_residual", qs.final_residual},
                     {"trace", qs.trace}};
    doc["files"] = files;
    write_json(opt.out / "steady.json", doc);
    return doc;
}

}  // namespace nnlif::io
