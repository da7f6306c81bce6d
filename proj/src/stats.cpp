#include "lifetail/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace lifetail {

double chi_squared_sf(double x, int df) {
    if (df < 1) throw std::invalid_argument("chi_squared_sf: df must be >= 1");
    if (std::isnan(x)) throw std::invalid_argument("chi_squared_sf: x is NaN");
    if (x <= 0.0) return 1.0;
    boost::math::chi_squared dist(static_cast<double>(df));
    return boost::math::cdf(boost::math::complement(dist, x));
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

double ks_distance(std::span<const double> sorted_sample_cdf) {
    const std::size_t n = sorted_sample_cdf.size();
    if (n == 0) throw std::invalid_argument("ks_distance: empty sample");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double f = sorted_sample_cdf[i];
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n) - f;
        const double lo = f - static_cast<double>(i) / static_cast<double>(n);
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

double ks_distance_uniform(std::span<const double> values) {
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    return ks_distance(sorted);
}

} // namespace lifetail
