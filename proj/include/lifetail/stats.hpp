#pragma once

#include <span>
#include <vector>

namespace lifetail {

/// Upper tail probability P(X > x) for a chi-square law with df degrees of freedom.
double chi_squared_sf(double x, int df);

/// Standard normal cumulative distribution function.
double normal_cdf(double z);

/// Kolmogorov-Smirnov distance of a sample from the uniform law on [0,1].
double ks_distance_uniform(std::span<const double> values);

/// Two-sided KS distance between an empirical sample and a cdf given on the
/// sorted sample points (caller evaluates the reference cdf).
double ks_distance(std::span<const double> sorted_sample_cdf);

} // namespace lifetail
