#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nnlif/error.hpp"
#include "nnlif/grid.hpp"
#include "nnlif/model.hpp"

namespace nnlif {

/// Learning velocity c_j = Nbar N_j K(w_j) - w_j.
inline std::vector<double> velocities(std::span<const double> N, double nbar, const ScalarFn& learning,
                                      const GridSpec& grid) {
    std::vector<double> c(N.size());
    for (std::size_t j = 0; j < N.size(); ++j) {
        const double w = grid.w(static_cast<int>(j));
        c[j] = nbar * N[j] * learning(w) - w;
    }
    return c;
}

/// Godunov face flux between nodes j and j+1: the smaller point flux when
/// p_j <= p_{j+1}, the larger one otherwise.
inline double godunov_flux(double p_left, double p_right, double flux_left, double flux_right) {
    return p_left <= p_right ? std::min(flux_left, flux_right) : std::max(flux_left, flux_right);
}

/// Face fluxes Phi_{i,j+1/2} for j = -1..n_w (stored at index j + 1), with the
/// two boundary faces held at zero.
struct WFluxField {
    int n_v = 0;
    int n_w = 0;
    std::vector<double> velocity;  ///< c_j
    std::vector<double> faces;     ///< row-major over i: faces[i * (n_w + 2) + (j + 1)]

    double face(int i, int j_half) const {
        return faces[static_cast<std::size_t>(i) * (n_w + 2) + static_cast<std::size_t>(j_half + 1)];
    }
};

inline WFluxField build_w_fluxes(const DensityState& state, const GridSpec& grid, std::vector<double> velocity) {
    const int nv = grid.n_v();
    const int nw = grid.n_w();
    WFluxField f;
    f.n_v = nv;
    f.n_w = nw;
    f.velocity = std::move(velocity);
    f.faces.assign(static_cast<std::size_t>(nv + 1) * (nw + 2), 0.0);
    for (int i = 0; i <= nv; ++i) {
        double* row = f.faces.data() + static_cast<std::size_t>(i) * (nw + 2);
        for (int j = 0; j < nw; ++j) {
            const double pl = state(i, j);
            const double pr = state(i, j + 1);
            row[j + 1] = godunov_flux(pl, pr, f.velocity[j] * pl, f.velocity[j + 1] * pr);
        }
    }
    return f;
}

/// Fluxes from the state's own level-m observables.
inline WFluxField build_w_fluxes(const DensityState& state, const GridSpec& grid, const CoefficientFns& coeffs) {
    const auto& obs = state.observables();
    return build_w_fluxes(state, grid, velocities(obs.N, obs.Nbar, coeffs.learning, grid));
}

/// p*_{i,j} = p_{i,j} - (dt/dw) (Phi_{i,j+1/2} - Phi_{i,j-1/2}); same layout as DensityState.
inline std::vector<double> convection_step(const DensityState& state, const WFluxField& fluxes,
                                           const GridSpec& grid) {
    const int nv = grid.n_v();
    const int nw = grid.n_w();
    const double ratio = grid.dt() / grid.dw();
    std::vector<double> out(state.values().begin(), state.values().end());
    for (int i = 0; i < nv; ++i) {
        for (int j = 0; j <= nw; ++j) {
            out[static_cast<std::size_t>(j) * (nv + 1) + i] -= ratio * (fluxes.face(i, j) - fluxes.face(i, j - 1));
        }
    }
    for (int j = 0; j <= nw; ++j) {
        out[static_cast<std::size_t>(j) * (nv + 1) + nv] = 0.0;
    }
    return out;
}

enum class PositivityPolicy { Abort, Warn };

struct PositivityReport {
    double min_value = 0.0;
    int min_i = 0;
    int min_j = 0;
    double courant = 0.0;  ///< (dt/dw) max_j |c_j|
    bool violated = false;
};

/// Checks p* >= -1e-13 max(p*). Under Abort a violation throws CFL_VIOLATION.
inline PositivityReport positivity_check(std::span<const double> p_star, const GridSpec& grid,
                                         std::span<const double> velocity, PositivityPolicy policy) {
    const int nv = grid.n_v();
    PositivityReport rep;
    double max_value = 0.0;
    std::size_t arg = 0;
    rep.min_value = p_star.empty() ? 0.0 : p_star[0];
    for (std::size_t k = 0; k < p_star.size(); ++k) {
        if (p_star[k] < rep.min_value) {
            rep.min_value = p_star[k];
            arg = k;
        }
        max_value = std::max(max_value, p_star[k]);
    }
    rep.min_i = static_cast<int>(arg % static_cast<std::size_t>(nv + 1));
    rep.min_j = static_cast<int>(arg / static_cast<std::size_t>(nv + 1));
    double cmax = 0.0;
    for (double c : velocity) cmax = std::max(cmax, std::abs(c));
    rep.courant = grid.dt() / grid.dw() * cmax;
    rep.violated = rep.min_value < -1e-13 * max_value;
    if (rep.violated && policy == PositivityPolicy::Abort) {
        throw Error(ErrorCode::CflViolation, "intermediate density " + std::to_string(rep.min_value) + " at (i=" +
                                                 std::to_string(rep.min_i) + ", j=" + std::to_string(rep.min_j) +
                                                 "), Courant number " + std::to_string(rep.courant));
    }
    return rep;
}

}  // namespace nnlif
