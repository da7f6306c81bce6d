#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lifetail/interval.hpp"

namespace lifetail {

/// P(max of n iid exponential excesses <= x) = (1 - e^{-x/sigma})^n.
/// n may be fractional (it is usually a regression estimate). Requires n >= 1.
double record_cdf(double sigma, double n, double x);

/// Density of the record: n e^{-x/sigma} (1 - e^{-x/sigma})^{n-1} / sigma.
double record_pdf(double sigma, double n, double x);

/// 1 - record_cdf, evaluated stably: for n e^{-x/sigma} small this is the
/// value of -expm1(n log(1 - e^{-x/sigma})), not a cancellation of two 1s.
double record_exceedance(double sigma, double n, double x);

/// Record law when the number of deaths is Poisson with mean n rather than
/// fixed: P(M_N <= x) = exp(-n e^{-x/sigma}). Requires n > 0.
double record_cdf_poisson(double sigma, double n, double x);

/// Density of the Poisson-mixed record: (n/sigma) e^{-x/sigma} exp(-n e^{-x/sigma}).
double record_pdf_poisson(double sigma, double n, double x);

/// Probability that the largest of n exponential excesses exceeds x — the
/// "is this lifetime an outlier" query. Identical to record_exceedance.
double outlier_probability(double sigma, double n, double x);

/// Inputs for a forecast-window record density: point estimates plus the 95%
/// intervals for both the scale and the expected death count. With both
/// intervals at 95% and independent, the band is a joint 90% statement.
struct RecordForecast {
    double sigma = 0.0;
    double n = 0.0;
    std::optional<Interval> sigma_interval;
    std::optional<Interval> n_interval;

    void validate() const; // throws std::invalid_argument
};

struct ForecastBand {
    std::vector<double> x;       // excess years
    std::vector<double> point;   // density at (sigma, n)
    std::vector<double> lower;   // density at (sigma_lo, n_lo): mass shifted left
    std::vector<double> upper;   // density at (sigma_hi, n_hi): mass shifted right
};

/// Record densities over a grid of excess years at the point estimates and at
/// both interval corners. Throws std::invalid_argument when an interval is absent.
ForecastBand forecast_band(const RecordForecast& f, std::span<const double> x_grid);

/// Default band grid: excess years 0..25 in steps of 0.05.
std::vector<double> default_forecast_grid();

} // namespace lifetail
