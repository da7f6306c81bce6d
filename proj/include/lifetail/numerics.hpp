#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

namespace lifetail {

/// log(1 - exp(a)) for a <= 0, written to avoid cancellation on both ends.
/// Splits at -ln 2 as usual: log(-expm1(a)) near zero, log1p(-exp(a)) far out.
inline double log1mexp(double a) {
    if (a > 0.0) return std::nan("");
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    constexpr double ln2 = 0.6931471805599453;
    return (a > -ln2) ? std::log(-std::expm1(a)) : std::log1p(-std::exp(a));
}

/// Neumaier-compensated accumulator. add() keeps a running correction term so
/// long sums agree with the sequential sum to ~1 ulp; infinities pass through.
struct CompensatedSum {
    double sum = 0.0;
    double correction = 0.0;

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) {
            correction += (sum - t) + x;
        } else {
            correction += (x - t) + sum;
        }
        sum = t;
    }

    double value() const {
        if (std::isinf(sum)) return sum;
        return sum + correction;
    }
};

/// 2x2 symmetric matrix helpers for covariance work. Row-major {a00,a01,a10,a11}.
inline std::optional<std::array<double, 4>> invert_2x2(const std::array<double, 4>& m) {
    const double det = m[0] * m[3] - m[1] * m[2];
    if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
    return std::array<double, 4>{m[3] / det, -m[1] / det, -m[2] / det, m[0] / det};
}

/// Eigenvalues of a symmetric 2x2 matrix, ascending.
inline std::array<double, 2> sym_eigenvalues_2x2(const std::array<double, 4>& m) {
    const double tr = m[0] + m[3];
    const double off = 0.5 * (m[1] + m[2]);
    const double disc = std::sqrt(0.25 * (m[0] - m[3]) * (m[0] - m[3]) + off * off);
    return {0.5 * tr - disc, 0.5 * tr + disc};
}

} // namespace lifetail
