#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>

#include "nnlif/error.hpp"

namespace nnlif {

/// Normalized Hermite function psi_n(y), evaluated by the stable three-term
/// upward recursion from psi_0 and psi_1.
inline double hermite(int n, double y) {
    if (n < 0) {
        throw Error(ErrorCode::InvalidArgument, "Hermite index must be nonnegative");
    }
    const double psi0 = std::pow(std::numbers::pi, -0.25) * std::exp(-0.5 * y * y);
    if (n == 0) {
        return psi0;
    }
    double prev = psi0;
    double cur = std::numbers::sqrt2 * y * psi0;
    for (int k = 1; k < n; ++k) {
        const double next = std::sqrt(2.0 / (k + 1)) * y * cur - std::sqrt(double(k) / (k + 1)) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

// Closed catalogue of scalar coefficient families. Every coefficient of the
// model (input I(w), learning strength K(w), firing transfer sigma(Nbar)) is
// one of these.
namespace fn {

struct Constant {
    double value = 0.0;
};

/// amplitude * exp(-(scale x + shift)^2) + offset
struct GaussianBump {
    double amplitude = 1.0;
    double scale = 1.0;
    double shift = 0.0;
    double offset = 0.0;
};

/// psi_index(scale x + shift) + offset
struct HermiteInput {
    int index = 0;
    double scale = 1.0;
    double shift = 0.0;
    double offset = 0.0;
};

/// value on [lower, upper], 0 elsewhere.
struct IndicatorScaled {
    double value = 1.0;
    double lower = -std::numeric_limits<double>::infinity();
    double upper = std::numeric_limits<double>::infinity();
};

/// slope * x
struct Identity {
    double slope = 1.0;
};

/// k x / (1 + x)
struct BoundedSigmoid {
    double k = 1.0;
};

}  // namespace fn

class ScalarFn {
public:
    using Family = std::variant<fn::Constant, fn::GaussianBump, fn::HermiteInput, fn::IndicatorScaled,
                                fn::Identity, fn::BoundedSigmoid>;

    ScalarFn() : family_(fn::Constant{0.0}) {}
    template <typename F>
        requires std::is_constructible_v<Family, F>
    ScalarFn(F f) : family_(std::move(f)) {}  // NOLINT: implicit by intent

    double operator()(double x) const {
        return std::visit([x](const auto& f) { return eval(f, x); }, family_);
    }

    const Family& family() const noexcept { return family_; }

    /// True when the value does not depend on the argument.
    bool is_constant() const noexcept { return std::holds_alternative<fn::Constant>(family_); }

    static ScalarFn constant(double c) { return fn::Constant{c}; }
    static ScalarFn identity(double slope = 1.0) { return fn::Identity{slope}; }
    static ScalarFn bounded_sigmoid(double k) { return fn::BoundedSigmoid{k}; }
    static ScalarFn gaussian(double amplitude, double scale, double shift, double offset = 0.0) {
        return fn::GaussianBump{amplitude, scale, shift, offset};
    }
    static ScalarFn hermite_input(int index, double scale, double shift, double offset = 1.0) {
        return fn::HermiteInput{index, scale, shift, offset};
    }
    static ScalarFn indicator(double value, double lower, double upper) {
        return fn::IndicatorScaled{value, lower, upper};
    }

private:
    static double eval(const fn::Constant& f, double) { return f.value; }
    static double eval(const fn::GaussianBump& f, double x) {
        const double y = f.scale * x + f.shift;
        return f.amplitude * std::exp(-y * y) + f.offset;
    }
    static double eval(const fn::HermiteInput& f, double x) {
        return hermite(f.index, f.scale * x + f.shift) + f.offset;
    }
    static double eval(const fn::IndicatorScaled& f, double x) {
        return (x >= f.lower && x <= f.upper) ? f.value : 0.0;
    }
    static double eval(const fn::Identity& f, double x) { return f.slope * x; }
    static double eval(const fn::BoundedSigmoid& f, double x) { return f.k * x / (1.0 + x); }

    Family family_;
};

}  // namespace nnlif
