#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "nnlif/error.hpp"
#include "nnlif/experiments.hpp"
#include "nnlif/functions.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/model.hpp"
#include "nnlif/stepper.hpp"
#include "nnlif/transport_w.hpp"

namespace nnlif::io {

using json = nlohmann::json;

struct SchemaIssue {
    std::string path;
    std::string message;
};

/// Every problem found in a config, not just the first.
class SchemaError : public Error {
public:
    explicit SchemaError(std::vector<SchemaIssue> issues)
        : Error(ErrorCode::SchemaError, summarize(issues)), issues_(std::move(issues)) {}

    const std::vector<SchemaIssue>& issues() const noexcept { return issues_; }

    bool mentions(const std::string& path) const {
        for (const auto& i : issues_) {
            if (i.path == path) return true;
        }
        return false;
    }

private:
    static std::string summarize(const std::vector<SchemaIssue>& issues) {
        std::string s = std::to_string(issues.size()) + " problem(s)";
        for (const auto& i : issues) s += "\n  " + i.path + ": " + i.message;
        return s;
    }

    std::vector<SchemaIssue> issues_;
};

enum class Campaign { Run, Orders, Ap, Learn, Excitatory, Steady };

inline std::string_view to_string(Campaign c) {
    switch (c) {
        case Campaign::Run: return "run";
        case Campaign::Orders: return "orders";
        case Campaign::Ap: return "ap";
        case Campaign::Learn: return "learn";
        case Campaign::Excitatory: return "excitatory";
        case Campaign::Steady: return "steady";
    }
    return "?";
}

struct OutputConfig {
    int stride = 1;
    std::vector<double> snapshot_times;
    std::string directory = "out";
};

struct OrdersCampaign {
    std::vector<Direction> directions{Direction::V, Direction::W, Direction::T};
    std::vector<double> horizons{0.1, 2.5};
    int levels = 5;
    double coarse_v = default_coarse_step(Direction::V);
    double coarse_w = default_coarse_step(Direction::W);
    double coarse_t = default_coarse_step(Direction::T);

    double coarse_step(Direction d) const {
        return d == Direction::V ? coarse_v : d == Direction::W ? coarse_w : coarse_t;
    }
};

struct ApCampaign {
    std::vector<SchemeVariant::Kind> variants{SchemeVariant::Kind::FI, SchemeVariant::Kind::SI};
    std::vector<double> dts{5e-4, 5e-3};
    std::vector<double> epsilons = default_ap_epsilons();
    int stride = 10;
};

enum class LearnFamily { Inhibitory, Excitatory };

struct LearnCampaign {
    LearnFamily family = LearnFamily::Inhibitory;
    int inputs = 5;
    bool diagonal_only = false;
};

struct ExcitatoryCampaign {
    presets::Scenario scenario = presets::Scenario::Steady;
    ClassifierOptions classifier;
};

struct SteadyCampaign {
    std::vector<double> H;  ///< empty: use the marginal of the initial condition
    std::optional<ScalarFn> input_override;
    double tolerance = 1e-12;
    int max_iterations = 1000;
};

struct RunConfig {
    ModelConfig model = presets::orders();
    OutputConfig output;
    Campaign campaign = Campaign::Run;
    OrdersCampaign orders;
    ApCampaign ap;
    LearnCampaign learn;
    ExcitatoryCampaign excitatory;
    SteadyCampaign steady;
};

namespace detail {

/// Walks one JSON object, reading typed fields with defaults and collecting
/// issues under dotted paths. finish() reports keys that were never read.
class Reader {
public:
    Reader(const json& node, std::string path, std::vector<SchemaIssue>& issues)
        : node_(node), path_(std::move(path)), issues_(issues) {}

    std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    const std::string& path() const noexcept { return path_; }
    void issue(const std::string& key, const std::string& message) const { issues_.push_back({at(key), message}); }

    bool has(const std::string& key) const { return node_.contains(key); }

    double number(const std::string& key, double fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number()) {
            issue(key, "expected a number");
            return fallback;
        }
        const double x = v->get<double>();
        if (!std::isfinite(x)) issue(key, "must be finite");
        return x;
    }

    /// Numbers may also be given as "inf" / "-inf" strings.
    double extended_number(const std::string& key, double fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (v->is_string()) {
            const auto s = v->get<std::string>();
            if (s == "inf") return std::numeric_limits<double>::infinity();
            if (s == "-inf") return -std::numeric_limits<double>::infinity();
        }
        if (!v->is_number()) {
            issue(key, "expected a number, \"inf\" or \"-inf\"");
            return fallback;
        }
        return v->get<double>();
    }

    int integer(const std::string& key, int fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_number_integer()) {
            issue(key, "expected an integer");
            return fallback;
        }
        return v->get<int>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_boolean()) {
            issue(key, "expected true or false");
            return fallback;
        }
        return v->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_string()) {
            issue(key, "expected a string");
            return fallback;
        }
        return v->get<std::string>();
    }

    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_array()) {
            issue(key, "expected an array of numbers");
            return fallback;
        }
        std::vector<double> out;
        for (std::size_t k = 0; k < v->size(); ++k) {
            const auto& e = (*v)[k];
            if (!e.is_number() || !std::isfinite(e.get<double>())) {
                issues_.push_back({at(key) + "[" + std::to_string(k) + "]", "expected a finite number"});
                continue;
            }
            out.push_back(e.get<double>());
        }
        return out;
    }

    std::vector<std::string> strings(const std::string& key, std::vector<std::string> fallback) {
        const json* v = take(key);
        if (!v) return fallback;
        if (!v->is_array()) {
            issue(key, "expected an array of strings");
            return fallback;
        }
        std::vector<std::string> out;
        for (std::size_t k = 0; k < v->size(); ++k) {
            if (!(*v)[k].is_string()) {
                issues_.push_back({at(key) + "[" + std::to_string(k) + "]", "expected a string"});
                continue;
            }
            out.push_back((*v)[k].get<std::string>());
        }
        return out;
    }

    /// Child object; nullopt when absent (or not an object, which is reported).
    std::optional<Reader> object(const std::string& key) {
        const json* v = take(key);
        if (!v) return std::nullopt;
        if (!v->is_object()) {
            issue(key, "expected an object");
            return std::nullopt;
        }
        return Reader(*v, at(key), issues_);
    }

    void finish() const {
        for (const auto& [key, value] : node_.items()) {
            if (!used_.count(key)) issues_.push_back({at(key), "unknown key"});
        }
    }

private:
    const json* take(const std::string& key) {
        used_.insert(key);
        const auto it = node_.find(key);
        return it == node_.end() ? nullptr : &*it;
    }

    const json& node_;
    std::string path_;
    std::vector<SchemaIssue>& issues_;
    std::set<std::string> used_;
};

inline ScalarFn read_function(Reader r, const ScalarFn& fallback) {
    const std::string type = r.string("type", "");
    ScalarFn out = fallback;
    if (type == "constant") {
        out = fn::Constant{r.number("value", 0.0)};
    } else if (type == "gaussian") {
        out = fn::GaussianBump{r.number("amplitude", 1.0), r.number("scale", 1.0), r.number("shift", 0.0),
                               r.number("offset", 0.0)};
    } else if (type == "hermite") {
        const int index = r.integer("index", 0);
        if (index < 0) r.issue("index", "must be >= 0");
        out = fn::HermiteInput{index, r.number("scale", 1.0), r.number("shift", 0.0), r.number("offset", 0.0)};
    } else if (type == "indicator") {
        const double lower = r.extended_number("lower", -std::numeric_limits<double>::infinity());
        const double upper = r.extended_number("upper", std::numeric_limits<double>::infinity());
        if (!(lower <= upper)) r.issue("upper", "must be >= lower");
        out = fn::IndicatorScaled{r.number("value", 1.0), lower, upper};
    } else if (type == "identity") {
        out = fn::Identity{r.number("slope", 1.0)};
    } else if (type == "bounded_sigmoid") {
        out = fn::BoundedSigmoid{r.number("k", 1.0)};
    } else {
        r.issue("type", "expected one of constant, gaussian, hermite, indicator, identity, bounded_sigmoid");
    }
    r.finish();
    return out;
}

inline void read_grid(Reader r, ModelConfig& m) {
    Domain& d = m.domain;
    d.v_min = r.number("v_min", d.v_min);
    d.v_F = r.number("v_F", d.v_F);
    d.v_R = r.number("v_R", d.v_R);
    d.w_min = r.number("w_min", d.w_min);
    d.w_max = r.number("w_max", d.w_max);
    d.t_max = r.number("t_max", d.t_max);
    m.dv = r.number("dv", m.dv);
    m.dw = r.number("dw", m.dw);
    m.dt = r.number("dt", m.dt);
    r.finish();

    if (!(d.v_min < d.v_F)) r.issue("v_F", "must exceed v_min");
    if (!(d.v_min < d.v_R && d.v_R < d.v_F)) r.issue("v_R", "must lie strictly between v_min and v_F");
    if (!(d.w_min < d.w_max)) r.issue("w_max", "must exceed w_min");
    if (!(d.t_max >= 0.0)) r.issue("t_max", "must be >= 0");
    const auto check_count = [&](const char* key, double h, double length) {
        if (!(h > 0.0)) {
            r.issue(key, "must be positive");
            return;
        }
        if (length <= 0.0) return;
        const double n = length / h;
        if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) {
            r.issue(key, "does not divide the interval into a whole number of steps");
        }
    };
    check_count("dv", m.dv, d.v_F - d.v_min);
    check_count("dw", m.dw, d.w_max - d.w_min);
    if (d.t_max > 0.0) check_count("dt", m.dt, d.t_max);
    if (m.dv > 0.0 && d.v_min < d.v_R && d.v_R < d.v_F) {
        const double r_exact = (d.v_R - d.v_min) / m.dv;
        const double n_v = std::round((d.v_F - d.v_min) / m.dv);
        if (std::abs(r_exact - std::round(r_exact)) > 1e-12 * std::max(1.0, r_exact)) {
            r.issue("v_R", "is not a node of the v-grid");
        } else if (std::round(r_exact) < 1.0 || std::round(r_exact) > n_v - 2.0) {
            r.issue("v_R", "reset node must satisfy 1 <= r <= n_v - 2");
        }
    }
}

inline void read_coefficients(Reader r, ModelConfig& m) {
    CoefficientFns& c = m.coeffs;
    c.a = r.number("a", c.a);
    c.epsilon = r.number("epsilon", c.epsilon);
    if (!(c.a > 0.0)) r.issue("a", "must be positive");
    if (!(c.epsilon > 0.0)) r.issue("epsilon", "must be positive");
    if (auto f = r.object("input")) c.input = read_function(*f, c.input);
    if (auto f = r.object("learning")) c.learning = read_function(*f, c.learning);
    if (auto f = r.object("transfer")) c.transfer = read_function(*f, c.transfer);
    r.finish();
}

inline void read_initial(Reader r, ModelConfig& m) {
    InitialCondition& ic = m.initial;
    const std::string type = r.string("type", "sine_window");
    if (type == "sine_window") {
        init::SineWindow s;
        s.v_lo = r.number("v_lo", s.v_lo);
        s.v_hi = r.number("v_hi", s.v_hi);
        s.w_lo = r.number("w_lo", s.w_lo);
        s.w_hi = r.number("w_hi", s.w_hi);
        if (!(s.v_lo < s.v_hi)) r.issue("v_hi", "must exceed v_lo");
        if (!(s.w_lo < s.w_hi)) r.issue("w_hi", "must exceed w_lo");
        ic.shape = s;
    } else if (type == "gaussian") {
        init::GaussianProduct g;
        g.amplitude = r.number("amplitude", g.amplitude);
        g.v_center = r.number("v_center", g.v_center);
        g.v_width = r.number("v_width", g.v_width);
        g.w_center = r.number("w_center", g.w_center);
        g.w_width = r.number("w_width", g.w_width);
        if (!(g.amplitude >= 0.0)) r.issue("amplitude", "must be >= 0");
        if (!(g.v_width > 0.0)) r.issue("v_width", "must be positive");
        if (!(g.w_width > 0.0)) r.issue("w_width", "must be positive");
        ic.shape = g;
    } else if (type == "tabulated") {
        init::Tabulated t;
        t.values = r.numbers("values", {});
        ic.shape = t;
    } else {
        r.issue("type", "expected one of sine_window, gaussian, tabulated");
    }
    ic.normalize = r.boolean("normalize", ic.normalize);
    r.finish();
}

inline void read_scheme(Reader r, ModelConfig& m) {
    const std::string variant = r.string("variant", m.variant.kind == SchemeVariant::Kind::SI ? "SI" : "FI");
    if (variant == "SI") {
        m.variant.kind = SchemeVariant::Kind::SI;
    } else if (variant == "FI") {
        m.variant.kind = SchemeVariant::Kind::FI;
    } else {
        r.issue("variant", "expected SI or FI");
    }
    m.variant.fixpoint_tol = r.number("fixpoint_tol", m.variant.fixpoint_tol);
    m.variant.max_iterations = r.integer("max_iterations", m.variant.max_iterations);
    if (!(m.variant.fixpoint_tol > 0.0)) r.issue("fixpoint_tol", "must be positive");
    if (m.variant.max_iterations < 1) r.issue("max_iterations", "must be >= 1");
    const std::string pos =
        r.string("positivity", m.step_options.positivity == PositivityPolicy::Abort ? "abort" : "warn");
    if (pos == "abort") {
        m.step_options.positivity = PositivityPolicy::Abort;
    } else if (pos == "warn") {
        m.step_options.positivity = PositivityPolicy::Warn;
    } else {
        r.issue("positivity", "expected abort or warn");
    }
    m.step_options.exponent_guard = r.number("exponent_guard", m.step_options.exponent_guard);
    if (!(m.step_options.exponent_guard > 0.0)) r.issue("exponent_guard", "must be positive");
    r.finish();
}

inline void read_output(Reader r, OutputConfig& o) {
    o.stride = r.integer("stride", o.stride);
    if (o.stride < 1) r.issue("stride", "must be >= 1");
    o.snapshot_times = r.numbers("snapshot_times", o.snapshot_times);
    for (double t : o.snapshot_times) {
        if (t < 0.0) r.issue("snapshot_times", "times must be >= 0");
    }
    o.directory = r.string("directory", o.directory);
    r.finish();
}

inline std::optional<Direction> parse_direction(const std::string& s) {
    if (s == "v") return Direction::V;
    if (s == "w") return Direction::W;
    if (s == "t") return Direction::T;
    return std::nullopt;
}

inline void read_campaign(Reader r, RunConfig& cfg) {
    const std::string type = r.string("type", std::string(to_string(cfg.campaign)));
    if (type == "run") {
        cfg.campaign = Campaign::Run;
    } else if (type == "orders") {
        cfg.campaign = Campaign::Orders;
        auto& o = cfg.orders;
        std::vector<std::string> dirs;
        for (auto d : o.directions) dirs.emplace_back(to_string(d));
        dirs = r.strings("directions", dirs);
        o.directions.clear();
        for (const auto& d : dirs) {
            if (auto p = parse_direction(d)) {
                o.directions.push_back(*p);
            } else {
                r.issue("directions", "unknown direction '" + d + "' (expected v, w or t)");
            }
        }
        o.horizons = r.numbers("horizons", o.horizons);
        for (double h : o.horizons) {
            if (!(h > 0.0)) r.issue("horizons", "must be positive");
        }
        o.levels = r.integer("levels", o.levels);
        if (o.levels < 3) r.issue("levels", "must be >= 3");
        if (auto c = r.object("coarse_steps")) {
            o.coarse_v = c->number("v", o.coarse_v);
            o.coarse_w = c->number("w", o.coarse_w);
            o.coarse_t = c->number("t", o.coarse_t);
            if (!(o.coarse_v > 0.0)) c->issue("v", "must be positive");
            if (!(o.coarse_w > 0.0)) c->issue("w", "must be positive");
            if (!(o.coarse_t > 0.0)) c->issue("t", "must be positive");
            c->finish();
        }
    } else if (type == "ap") {
        cfg.campaign = Campaign::Ap;
        auto& a = cfg.ap;
        std::vector<std::string> names;
        for (auto v : a.variants) names.emplace_back(v == SchemeVariant::Kind::SI ? "SI" : "FI");
        names = r.strings("variants", names);
        a.variants.clear();
        for (const auto& n : names) {
            if (n == "SI") {
                a.variants.push_back(SchemeVariant::Kind::SI);
            } else if (n == "FI") {
                a.variants.push_back(SchemeVariant::Kind::FI);
            } else {
                r.issue("variants", "unknown variant '" + n + "' (expected SI or FI)");
            }
        }
        a.dts = r.numbers("dts", a.dts);
        a.epsilons = r.numbers("epsilons", a.epsilons);
        for (double x : a.dts) {
            if (!(x > 0.0)) r.issue("dts", "must be positive");
        }
        for (double x : a.epsilons) {
            if (!(x > 0.0)) r.issue("epsilons", "must be positive");
        }
        a.stride = r.integer("stride", a.stride);
        if (a.stride < 1) r.issue("stride", "must be >= 1");
    } else if (type == "learn") {
        cfg.campaign = Campaign::Learn;
        auto& l = cfg.learn;
        const std::string fam = r.string("family", "inhibitory");
        if (fam == "inhibitory") {
            l.family = LearnFamily::Inhibitory;
        } else if (fam == "excitatory") {
            l.family = LearnFamily::Excitatory;
        } else {
            r.issue("family", "expected inhibitory or excitatory");
        }
        l.inputs = r.integer("inputs", l.inputs);
        if (l.inputs < 1) r.issue("inputs", "must be >= 1");
        l.diagonal_only = r.boolean("diagonal_only", l.diagonal_only);
    } else if (type == "excitatory") {
        cfg.campaign = Campaign::Excitatory;
        auto& e = cfg.excitatory;
        const std::string sc = r.string("scenario", "steady");
        if (sc == "steady") {
            e.scenario = presets::Scenario::Steady;
        } else if (sc == "unsteady") {
            e.scenario = presets::Scenario::Unsteady;
        } else {
            r.issue("scenario", "expected steady or unsteady");
        }
        e.classifier.lag_steps = r.integer("lag_steps", e.classifier.lag_steps);
        e.classifier.h_tolerance = r.number("h_tolerance", e.classifier.h_tolerance);
        e.classifier.nbar_tolerance = r.number("nbar_tolerance", e.classifier.nbar_tolerance);
        e.classifier.triangle_r2 = r.number("triangle_r2", e.classifier.triangle_r2);
        if (e.classifier.lag_steps < 1) r.issue("lag_steps", "must be >= 1");
    } else if (type == "steady") {
        cfg.campaign = Campaign::Steady;
        auto& s = cfg.steady;
        s.H = r.numbers("H", s.H);
        for (double h : s.H) {
            if (h < 0.0) r.issue("H", "entries must be >= 0");
        }
        if (auto f = r.object("input_override")) s.input_override = read_function(*f, ScalarFn::constant(0.0));
        s.tolerance = r.number("tolerance", s.tolerance);
        s.max_iterations = r.integer("max_iterations", s.max_iterations);
        if (!(s.tolerance > 0.0)) r.issue("tolerance", "must be positive");
        if (s.max_iterations < 1) r.issue("max_iterations", "must be >= 1");
    } else {
        r.issue("type", "expected one of run, orders, ap, learn, excitatory, steady");
    }
    r.finish();
}

// --- serialization ---------------------------------------------------------

inline json number_or_inf(double x) {
    if (std::isinf(x)) return x > 0 ? json("inf") : json("-inf");
    return x;
}

inline json function_json(const ScalarFn& f) {
    return std::visit(
        [](const auto& g) -> json {
            using T = std::decay_t<decltype(g)>;
            if constexpr (std::is_same_v<T, fn::Constant>) {
                return {{"type", "constant"}, {"value", g.value}};
            } else if constexpr (std::is_same_v<T, fn::GaussianBump>) {
                return {{"type", "gaussian"},
                        {"amplitude", g.amplitude},
                        {"scale", g.scale},
                        {"shift", g.shift},
                        {"offset", g.offset}};
            } else if constexpr (std::is_same_v<T, fn::HermiteInput>) {
                return {{"type", "hermite"}, {"index", g.index}, {"scale", g.scale}, {"shift", g.shift},
                        {"offset", g.offset}};
            } else if constexpr (std::is_same_v<T, fn::IndicatorScaled>) {
                return {{"type", "indicator"},
                        {"value", g.value},
                        {"lower", number_or_inf(g.lower)},
                        {"upper", number_or_inf(g.upper)}};
            } else if constexpr (std::is_same_v<T, fn::Identity>) {
                return {{"type", "identity"}, {"slope", g.slope}};
            } else {
                return {{"type", "bounded_sigmoid"}, {"k", g.k}};
            }
        },
        f.family());
}

inline json initial_json(const InitialCondition& ic) {
    json j = std::visit(
        [](const auto& s) -> json {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, init::SineWindow>) {
                return {{"type", "sine_window"}, {"v_lo", s.v_lo}, {"v_hi", s.v_hi}, {"w_lo", s.w_lo},
                        {"w_hi", s.w_hi}};
            } else if constexpr (std::is_same_v<T, init::GaussianProduct>) {
                return {{"type", "gaussian"},     {"amplitude", s.amplitude}, {"v_center", s.v_center},
                        {"v_width", s.v_width},   {"w_center", s.w_center},   {"w_width", s.w_width}};
            } else {
                return {{"type", "tabulated"}, {"values", s.values}};
            }
        },
        ic.shape);
    j["normalize"] = ic.normalize;
    return j;
}

}  // namespace detail

/// Validates a JSON document against the config schema. Missing keys take
/// the defaults of the order-study setup; unknown keys are errors.
inline RunConfig parse_config(const json& doc) {
    std::vector<SchemaIssue> issues;
    RunConfig cfg;
    if (!doc.is_object()) {
        throw SchemaError(std::vector<SchemaIssue>{{"", "config must be a JSON object"}});
    }
    detail::Reader root(doc, "", issues);
    if (auto r = root.object("grid")) detail::read_grid(*r, cfg.model);
    if (auto r = root.object("coefficients")) detail::read_coefficients(*r, cfg.model);
    if (auto r = root.object("initial")) detail::read_initial(*r, cfg.model);
    if (auto r = root.object("scheme")) detail::read_scheme(*r, cfg.model);
    if (auto r = root.object("output")) detail::read_output(*r, cfg.output);
    if (auto r = root.object("campaign")) detail::read_campaign(*r, cfg);
    root.finish();

    if (issues.empty()) {
        try {
            (void)cfg.model.grid();
        } catch (const Error& e) {
            issues.push_back({e.code() == ErrorCode::ResetOffGrid ? "grid.v_R" : "grid", e.message()});
        }
    }
    if (issues.empty()) {
        if (const auto* tab = std::get_if<init::Tabulated>(&cfg.model.initial.shape)) {
            const auto grid = cfg.model.grid();
            if (tab->values.size() != grid.node_count()) {
                issues.push_back({"initial.values", "needs " + std::to_string(grid.node_count()) + " values"});
            }
        }
        if (cfg.campaign == Campaign::Steady && !cfg.steady.H.empty()) {
            const auto grid = cfg.model.grid();
            if (static_cast<int>(cfg.steady.H.size()) != grid.n_w() + 1) {
                issues.push_back({"campaign.H", "needs n_w + 1 = " + std::to_string(grid.n_w() + 1) + " values"});
            }
        }
    }
    if (!issues.empty()) throw SchemaError(std::move(issues));
    return cfg;
}

inline RunConfig parse_config_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::vector<SchemaIssue>{{"", std::string("malformed JSON: ") + e.what()}});
    }
    return parse_config(doc);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

/// Fully resolved config (defaults filled in); parse_config(to_json(c)) == c.
inline json to_json(const RunConfig& c) {
    const auto& m = c.model;
    const auto& d = m.domain;
    json j;
    j["grid"] = {{"v_min", d.v_min}, {"v_F", d.v_F},     {"v_R", d.v_R}, {"w_min", d.w_min}, {"w_max", d.w_max},
                 {"t_max", d.t_max}, {"dv", m.dv},       {"dw", m.dw},   {"dt", m.dt}};
    j["coefficients"] = {{"a", m.coeffs.a},
                         {"epsilon", m.coeffs.epsilon},
                         {"input", detail::function_json(m.coeffs.input)},
                         {"learning", detail::function_json(m.coeffs.learning)},
                         {"transfer", detail::function_json(m.coeffs.transfer)}};
    j["initial"] = detail::initial_json(m.initial);
    j["scheme"] = {{"variant", m.variant.kind == SchemeVariant::Kind::SI ? "SI" : "FI"},
                   {"fixpoint_tol", m.variant.fixpoint_tol},
                   {"max_iterations", m.variant.max_iterations},
                   {"positivity", m.step_options.positivity == PositivityPolicy::Abort ? "abort" : "warn"},
                   {"exponent_guard", m.step_options.exponent_guard}};
    j["output"] = {{"stride", c.output.stride},
                   {"snapshot_times", c.output.snapshot_times},
                   {"directory", c.output.directory}};
    json camp = {{"type", to_string(c.campaign)}};
    switch (c.campaign) {
        case Campaign::Run: break;
        case Campaign::Orders: {
            std::vector<std::string> dirs;
            for (auto dir : c.orders.directions) dirs.emplace_back(to_string(dir));
            camp["directions"] = dirs;
            camp["horizons"] = c.orders.horizons;
            camp["levels"] = c.orders.levels;
            camp["coarse_steps"] = {{"v", c.orders.coarse_v}, {"w", c.orders.coarse_w}, {"t", c.orders.coarse_t}};
            break;
        }
        case Campaign::Ap: {
            std::vector<std::string> names;
            for (auto v : c.ap.variants) names.emplace_back(v == SchemeVariant::Kind::SI ? "SI" : "FI");
            camp["variants"] = names;
            camp["dts"] = c.ap.dts;
            camp["epsilons"] = c.ap.epsilons;
            camp["stride"] = c.ap.stride;
            break;
        }
        case Campaign::Learn:
            camp["family"] = c.learn.family == LearnFamily::Inhibitory ? "inhibitory" : "excitatory";
            camp["inputs"] = c.learn.inputs;
            camp["diagonal_only"] = c.learn.diagonal_only;
            break;
        case Campaign::Excitatory:
            camp["scenario"] = presets::to_string(c.excitatory.scenario);
            camp["lag_steps"] = c.excitatory.classifier.lag_steps;
            camp["h_tolerance"] = c.excitatory.classifier.h_tolerance;
            camp["nbar_tolerance"] = c.excitatory.classifier.nbar_tolerance;
            camp["triangle_r2"] = c.excitatory.classifier.triangle_r2;
            break;
        case Campaign::Steady:
            camp["H"] = c.steady.H;
            if (c.steady.input_override) camp["input_override"] = detail::function_json(*c.steady.input_override);
            camp["tolerance"] = c.steady.tolerance;
            camp["max_iterations"] = c.steady.max_iterations;
            break;
    }
    j["campaign"] = camp;
    return j;
}

/// FNV-1a 64 over the canonical (sorted-key, compact) dump of the resolved config.
inline std::string config_hash(const RunConfig& c) {
    const std::string text = to_json(c).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nnlif::io
