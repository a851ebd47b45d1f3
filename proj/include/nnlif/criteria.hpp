#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "nnlif/experiments.hpp"
#include "nnlif/stepper.hpp"

namespace nnlif::criteria {

struct Verdict {
    bool pass = false;
    std::string detail;
};

inline std::string fmt(double x, const char* spec = "%.4g") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

inline std::string join(const std::vector<double>& xs, const char* spec = "%.4g") {
    std::string s;
    for (std::size_t k = 0; k < xs.size(); ++k) s += (k ? ", " : "") + fmt(xs[k], spec);
    return s;
}

/// Relative mass drift per step stays below tol for every listed run.
inline Verdict mass_conservation(const std::vector<RunSummary>& runs, double tol = 1e-12) {
    Verdict v{true, "max drift per step:"};
    for (const auto& r : runs) {
        v.pass = v.pass && r.steps > 0 && r.max_relative_mass_drift <= tol;
        v.detail += " " + fmt(r.max_relative_mass_drift, "%.3g");
    }
    v.detail += " (tol " + fmt(tol, "%.0e") + ")";
    return v;
}

/// min p >= -tol * max p at every step; intermediate violations count too.
inline Verdict positivity(const std::vector<RunSummary>& runs, double tol = 1e-13) {
    Verdict v{true, ""};
    double worst = 0.0;
    int warnings = 0;
    for (const auto& r : runs) {
        worst = std::min(worst, r.worst_relative_min);
        warnings += r.positivity_warnings;
        v.pass = v.pass && r.steps > 0 && r.worst_relative_min >= -tol && r.positivity_warnings == 0;
    }
    v.detail = std::to_string(runs.size()) + " runs, worst min/max " + fmt(worst, "%.3g") +
               ", intermediate violations " + std::to_string(warnings);
    return v;
}

struct OrderBand {
    double lo = 0.0;
    double hi = 0.0;
};

inline OrderBand expected_band(Direction d) {
    switch (d) {
        case Direction::V: return {1.8, 2.2};
        case Direction::W: return {0.85, 1.1};
        case Direction::T: return {0.9, 1.1};
    }
    return {};
}

/// Every L1 order of the study lies in the direction's band.
inline Verdict order_band(const OrderStudy& st) {
    const auto band = expected_band(st.direction);
    Verdict v{!st.order_l1.empty(), std::string(to_string(st.direction)) + " [" + join(st.order_l1, "%.3f") +
                                        "] in [" + fmt(band.lo, "%.2f") + ", " + fmt(band.hi, "%.2f") + "]"};
    for (double o : st.order_l1) v.pass = v.pass && o >= band.lo && o <= band.hi;
    return v;
}

inline Verdict orders(const std::vector<OrderStudy>& studies) {
    Verdict v{!studies.empty(), ""};
    for (const auto& st : studies) {
        const auto one = order_band(st);
        v.pass = v.pass && one.pass;
        v.detail += (v.detail.empty() ? "" : "; ") + one.detail + (one.pass ? "" : " FAIL");
    }
    return v;
}

/// All orders and differences finite.
inline Verdict finite_orders(const std::vector<OrderStudy>& studies) {
    Verdict v{!studies.empty(), ""};
    for (const auto& st : studies) {
        bool ok = !st.order_l1.empty();
        for (double x : st.order_l1) ok = ok && std::isfinite(x);
        for (double x : st.order_l2) ok = ok && std::isfinite(x);
        for (double x : st.diff_l1) ok = ok && std::isfinite(x);
        v.pass = v.pass && ok;
        v.detail += (v.detail.empty() ? "" : "; ") + std::string(to_string(st.direction)) + " [" +
                    join(st.order_l1, "%.3f") + "]";
    }
    return v;
}

inline const ApCurve* find_curve(const std::vector<ApCurve>& curves, double eps) {
    for (const auto& c : curves) {
        if (std::abs(c.epsilon - eps) <= 1e-12 * eps) return &c;
    }
    return nullptr;
}

/// FI: terminal distance strictly decreasing along the epsilon list (largest first).
inline Verdict ap_decay(const std::vector<ApCurve>& fi) {
    Verdict v{fi.size() >= 2, "FI terminal distances [" };
    std::vector<double> d;
    for (const auto& c : fi) d.push_back(c.final_distance());
    for (std::size_t k = 0; k + 1 < d.size(); ++k) v.pass = v.pass && d[k + 1] < d[k];
    v.detail += join(d, "%.3e") + "]";
    return v;
}

/// SI: plateau between eps = 1e-6 and 1e-7 (within a factor 2), both at least 10x the FI distance.
inline Verdict ap_plateau(const std::vector<ApCurve>& si, const std::vector<ApCurve>& fi) {
    const ApCurve* s6 = find_curve(si, 1e-6);
    const ApCurve* s7 = find_curve(si, 1e-7);
    const ApCurve* f6 = find_curve(fi, 1e-6);
    const ApCurve* f7 = find_curve(fi, 1e-7);
    if (!s6 || !s7 || !f6 || !f7) return {false, "missing eps = 1e-6 or 1e-7 curves"};
    const double a = s6->final_distance(), b = s7->final_distance();
    const double plateau = std::max(a, b) / std::min(a, b);
    const double r6 = a / f6->final_distance();
    const double r7 = b / f7->final_distance();
    Verdict v;
    v.pass = plateau <= 2.0 && r6 >= 10.0 && r7 >= 10.0;
    v.detail = "SI distances " + fmt(a, "%.3e") + ", " + fmt(b, "%.3e") + " (ratio " + fmt(plateau, "%.3f") +
               " <= 2), SI/FI " + fmt(r6, "%.3g") + ", " + fmt(r7, "%.3g") + " (>= 10)";
    return v;
}

/// Diagonal R^2 >= r2 for every row; with off-diagonal cells present, each
/// row also needs one cell at least `gap` below its diagonal.
inline Verdict recognition(const RecognitionMatrix& m, double r2 = 0.95, double gap = 0.1) {
    Verdict v{m.size > 0, ""};
    bool full = true;
    for (int i = 0; i < m.size; ++i) {
        const auto& d = m.cell(i, i);
        if (!d) {
            v.pass = false;
            continue;
        }
        const double rd = d->triangle.fit.r2;
        bool row_ok = rd >= r2;
        double lowest = rd;
        bool any_off = false;
        for (int j = 0; j < m.size; ++j) {
            if (j == i || !m.cell(i, j)) continue;
            any_off = true;
            lowest = std::min(lowest, m.cell(i, j)->triangle.fit.r2);
        }
        if (any_off) {
            row_ok = row_ok && lowest <= rd - gap;
        } else {
            full = false;
        }
        v.pass = v.pass && row_ok;
        v.detail += (v.detail.empty() ? "" : "; ") + std::to_string(i) + ": diag " + fmt(rd, "%.4f");
        if (any_off) v.detail += " min off " + fmt(lowest, "%.3f");
    }
    if (!full) v.detail += " (diagonal only)";
    return v;
}

inline Verdict excitatory(const ExcitatoryResult& steady, const ExcitatoryResult& unsteady, double r2 = 0.95) {
    const auto& tri = steady.triangle;
    const bool triangular = tri.fit.r2 >= r2 && tri.fit.slope > 0.0 && tri.support_left >= -1e-9;
    Verdict v;
    v.pass = steady.classification == Classification::Converged && triangular &&
             unsteady.classification == Classification::Expanding && unsteady.nbar_increasing;
    v.detail = "steady " + std::string(to_string(steady.classification)) + " triangle R2 " +
               fmt(tri.fit.r2, "%.4f") + " on [" + fmt(tri.support_left, "%.3g") + ", " +
               fmt(tri.support_right, "%.3g") + "]; unsteady " + std::string(to_string(unsteady.classification)) +
               ", Nbar increasing " + (unsteady.nbar_increasing ? "yes" : "no");
    return v;
}

}  // namespace nnlif::criteria
