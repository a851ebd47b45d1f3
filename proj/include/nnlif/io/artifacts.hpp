#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "nnlif/error.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/maxwellian.hpp"
#include "nnlif/model.hpp"
#include "nnlif/stepper.hpp"

namespace nnlif::io {

/// Shortest round-trip decimal form; NaN and infinities spelled out.
inline std::string format_double(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

/// Row-oriented CSV writer with a fixed header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header) : path_(path) {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path);
        if (!out_) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
        row_strings(header);
    }

    template <typename... Ts>
    void row(const Ts&... values) {
        bool first = true;
        ((out_ << (first ? "" : ",") << cell(values), first = false), ...);
        out_ << '\n';
    }

    void row_strings(const std::vector<std::string>& values) {
        for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << values[k];
        out_ << '\n';
    }

    ~CsvWriter() { out_.flush(); }

private:
    static std::string cell(double x) { return format_double(x); }
    static std::string cell(int x) { return std::to_string(x); }
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }

    std::filesystem::path path_;
    std::ofstream out_;
};

inline void write_trajectory_csv(const std::filesystem::path& path, const std::vector<TrajectoryRow>& rows) {
    CsvWriter csv(path, {"step", "t", "Nbar", "mass", "min_p", "w_support_left", "w_support_right"});
    for (const auto& r : rows) csv.row(r.step, r.t, r.nbar, r.mass, r.min_p, r.w_support_left, r.w_support_right);
}

/// (w, N, H) per weight node.
inline void write_profile_csv(const std::filesystem::path& path, const GridSpec& grid, std::span<const double> N,
                              std::span<const double> H) {
    CsvWriter csv(path, {"w", "N", "H"});
    for (int j = 0; j <= grid.n_w(); ++j) csv.row(grid.w(j), N[j], H[j]);
}

inline void write_profile_csv(const std::filesystem::path& path, const GridSpec& grid, const Observables& obs) {
    write_profile_csv(path, grid, obs.N, obs.H);
}

/// (v, w, p) over every node, w-major.
inline void write_snapshot_csv(const std::filesystem::path& path, const GridSpec& grid, std::span<const double> p) {
    CsvWriter csv(path, {"v", "w", "p"});
    const int nv = grid.n_v();
    for (int j = 0; j <= grid.n_w(); ++j) {
        for (int i = 0; i <= nv; ++i) csv.row(grid.v(i), grid.w(j), p[static_cast<std::size_t>(j) * (nv + 1) + i]);
    }
}

/// Per-column operator at the given Nbar: Maxwellian exponent, the three
/// diagonals of M and its single reinjection entry.
inline void write_matrices_csv(const std::filesystem::path& path, const GridSpec& grid, const CoefficientFns& coeffs,
                               double nbar, double exponent_guard) {
    CsvWriter csv(path, {"j", "i", "w", "v", "g", "diag", "sub", "super", "reinject_row", "reinject_col", "reinject_value"});
    const double lambda = coeffs.a * grid.dt() / (grid.dv() * grid.dv());
    for (int j = 0; j <= grid.n_w(); ++j) {
        const auto col = build_column(grid, coeffs, j, nbar, exponent_guard);
        const auto mat = assemble_matrix(col, lambda, coeffs.epsilon);
        for (int i = 0; i < grid.n_v(); ++i) {
            csv.row(j, i, grid.w(j), grid.v(i), col.g[i], mat.diag[i], i > 0 ? mat.sub[i - 1] : 0.0,
                    i + 1 < grid.n_v() ? mat.super[i] : 0.0, mat.shift_row, mat.shift_col, mat.shift_value);
        }
    }
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
}

/// JSON has no NaN/inf; those become null.
inline nlohmann::json finite_or_null(double x) {
    return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr);
}

inline nlohmann::json summary_json(const RunSummary& s) {
    return {{"steps", s.steps},
            {"max_relative_mass_drift", s.max_relative_mass_drift},
            {"worst_relative_min", s.worst_relative_min},
            {"max_fixpoint_iterations", s.max_fixpoint_iterations},
            {"fixpoint_failures", s.fixpoint_failures},
            {"positivity_warnings", s.positivity_warnings},
            {"max_courant", s.max_courant},
            {"boundary_support_steps", s.boundary_support_steps},
            {"initial_mass", s.initial_mass},
            {"final_mass", s.final_mass}};
}

}  // namespace nnlif::io
