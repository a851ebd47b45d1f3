#pragma once

#include <cmath>
#include <span>

namespace nnlif {

/// Neumaier-compensated sum in fixed index order (deterministic).
inline double compensated_sum(std::span<const double> xs) {
    double sum = 0.0;
    double carry = 0.0;
    for (double x : xs) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            carry += (sum - t) + x;
        } else {
            carry += (x - t) + sum;
        }
        sum = t;
    }
    return sum + carry;
}

}  // namespace nnlif
