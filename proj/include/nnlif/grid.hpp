#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "nnlif/error.hpp"

namespace nnlif {

/// Physical extent of the truncated (v, w, t) box plus the reset potential.
struct Domain {
    double v_min = -4.0;
    double v_F = 2.0;
    double v_R = 1.0;
    double w_min = -1.1;
    double w_max = 0.1;
    double t_max = 0.1;

    bool operator==(const Domain&) const = default;
};

struct Resolution {
    int n_v = 60;
    int n_w = 120;
    int n_t = 100;

    bool operator==(const Resolution&) const = default;
};

/// Uniform node lattice v_i = v_min + i dv (i = 0..n_v), w_j = w_min + j dw
/// (j = 0..n_w), t^m = m dt (m = 0..n_t). The reset potential sits on node r.
///
/// n_t = 0 is accepted only together with t_max = 0 and means "no time
/// stepping" (dt is then 0).
class GridSpec {
public:
    static GridSpec build(const Domain& domain, const Resolution& res) {
        if (!(domain.v_min < domain.v_F) || !(domain.w_min < domain.w_max)) {
            throw Error(ErrorCode::DegenerateDomain, "empty v or w interval");
        }
        if (!(domain.v_min < domain.v_R && domain.v_R < domain.v_F)) {
            throw Error(ErrorCode::DegenerateDomain, "v_R must lie strictly inside (v_min, v_F)");
        }
        if (res.n_v < 2 || res.n_w < 2) {
            throw Error(ErrorCode::DegenerateDomain, "n_v and n_w must be at least 2");
        }
        const bool no_time = res.n_t == 0 && domain.t_max == 0.0;
        if (!no_time && (res.n_t < 2 || !(domain.t_max > 0.0))) {
            throw Error(ErrorCode::DegenerateDomain,
                        "need t_max > 0 and n_t >= 2 (or t_max = 0 with n_t = 0)");
        }

        GridSpec g;
        g.domain_ = domain;
        g.res_ = res;
        g.dv_ = (domain.v_F - domain.v_min) / res.n_v;
        g.dw_ = (domain.w_max - domain.w_min) / res.n_w;
        g.dt_ = no_time ? 0.0 : domain.t_max / res.n_t;

        const double ratio = (domain.v_R - domain.v_min) / g.dv_;
        const double r = std::round(ratio);
        if (std::abs(domain.v_min + r * g.dv_ - domain.v_R) > 1e-12 * g.dv_) {
            throw Error(ErrorCode::ResetOffGrid,
                        "v_R = " + std::to_string(domain.v_R) + " is not a node of the v lattice");
        }
        g.r_ = static_cast<int>(r);
        if (g.r_ < 1 || g.r_ > res.n_v - 2) {
            throw Error(ErrorCode::ResetOffGrid, "reset index must satisfy 1 <= r <= n_v - 2");
        }
        return g;
    }

    /// Builds a grid from step sizes; each interval length must be an integer
    /// multiple of its step.
    static GridSpec from_steps(const Domain& domain, double dv, double dw, double dt) {
        Resolution res;
        res.n_v = count_for(domain.v_F - domain.v_min, dv, "dv");
        res.n_w = count_for(domain.w_max - domain.w_min, dw, "dw");
        res.n_t = domain.t_max == 0.0 ? 0 : count_for(domain.t_max, dt, "dt");
        return build(domain, res);
    }

    const Domain& domain() const noexcept { return domain_; }
    const Resolution& resolution() const noexcept { return res_; }

    int n_v() const noexcept { return res_.n_v; }
    int n_w() const noexcept { return res_.n_w; }
    int n_t() const noexcept { return res_.n_t; }
    double dv() const noexcept { return dv_; }
    double dw() const noexcept { return dw_; }
    double dt() const noexcept { return dt_; }
    /// Index of the reset node, v_r = V_R.
    int reset_index() const noexcept { return r_; }

    double v(int i) const noexcept { return domain_.v_min + i * dv_; }
    double w(int j) const noexcept { return domain_.w_min + j * dw_; }
    double t(int m) const noexcept { return m * dt_; }

    /// Number of stored nodes (n_v + 1)(n_w + 1).
    std::size_t node_count() const noexcept {
        return static_cast<std::size_t>(res_.n_v + 1) * static_cast<std::size_t>(res_.n_w + 1);
    }

    bool operator==(const GridSpec&) const = default;

private:
    GridSpec() = default;

    static int count_for(double length, double step, const char* name) {
        if (!(step > 0.0)) {
            throw Error(ErrorCode::DegenerateDomain, std::string(name) + " must be positive");
        }
        const double n = std::round(length / step);
        if (n < 1.0 || std::abs(n * step - length) > 1e-9 * std::abs(length)) {
            throw Error(ErrorCode::DegenerateDomain,
                        std::string(name) + " does not divide its interval into whole steps");
        }
        return static_cast<int>(n);
    }

    Domain domain_{};
    Resolution res_{};
    double dv_ = 0.0;
    double dw_ = 0.0;
    double dt_ = 0.0;
    int r_ = 0;
};

inline GridSpec build_grid(const Domain& domain, const Resolution& res) {
    return GridSpec::build(domain, res);
}

}  // namespace nnlif
