#pragma once

namespace lifetail {

/// Closed interval [lo, hi], used for confidence bounds.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    double width() const { return hi - lo; }
};

} // namespace lifetail
