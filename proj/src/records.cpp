#include "lifetail/records.hpp"

#include <cmath>
#include <stdexcept>

#include "lifetail/numerics.hpp"

namespace lifetail {

namespace {

void check_args(double sigma, double n, double x, double n_floor) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw std::invalid_argument("record law: sigma must be > 0");
    if (!(n >= n_floor) || !std::isfinite(n)) {
        throw std::invalid_argument(n_floor == 1.0 ? "record law: n must be >= 1"
                                                   : "record law: n must be > 0");
    }
    if (std::isnan(x) || x < 0.0) throw std::invalid_argument("record law: x must be >= 0");
}

} // namespace

double record_cdf(double sigma, double n, double x) {
    check_args(sigma, n, x, 1.0);
    // (1 - e^{-x/sigma})^n as exp(n log1mexp(-x/sigma)); exact at both tails.
    return std::exp(n * log1mexp(-x / sigma));
}

double record_exceedance(double sigma, double n, double x) {
    check_args(sigma, n, x, 1.0);
    return -std::expm1(n * log1mexp(-x / sigma));
}

double record_pdf(double sigma, double n, double x) {
    check_args(sigma, n, x, 1.0);
    if (x == 0.0) return n == 1.0 ? 1.0 / sigma : 0.0;
    const double u = -x / sigma;
    return std::exp(std::log(n) + u + (n - 1.0) * log1mexp(u)) / sigma;
}

double record_cdf_poisson(double sigma, double n, double x) {
    check_args(sigma, n, x, 0.0);
    if (!(n > 0.0)) throw std::invalid_argument("record law: n must be > 0");
    return std::exp(-n * std::exp(-x / sigma));
}

double record_pdf_poisson(double sigma, double n, double x) {
    check_args(sigma, n, x, 0.0);
    if (!(n > 0.0)) throw std::invalid_argument("record law: n must be > 0");
    const double e = std::exp(-x / sigma);
    return (n / sigma) * e * std::exp(-n * e);
}

double outlier_probability(double sigma, double n, double x) {
    return record_exceedance(sigma, n, x);
}

void RecordForecast::validate() const {
    if (!(sigma > 0.0) || !(n > 0.0)) {
        throw std::invalid_argument("RecordForecast: sigma and n must be > 0");
    }
    if (sigma_interval && !(sigma_interval->lo > 0.0 && sigma_interval->contains(sigma))) {
        throw std::invalid_argument("RecordForecast: sigma interval must be positive and bracket sigma");
    }
    if (n_interval && !(n_interval->lo > 0.0 && n_interval->contains(n))) {
        throw std::invalid_argument("RecordForecast: n interval must be positive and bracket n");
    }
}

ForecastBand forecast_band(const RecordForecast& f, std::span<const double> x_grid) {
    f.validate();
    if (!f.sigma_interval || !f.n_interval) {
        throw std::invalid_argument("forecast_band: confidence intervals for sigma and n are required");
    }
    ForecastBand band;
    band.x.assign(x_grid.begin(), x_grid.end());
    band.point.reserve(x_grid.size());
    band.lower.reserve(x_grid.size());
    band.upper.reserve(x_grid.size());
    for (double x : x_grid) {
        band.point.push_back(record_pdf(f.sigma, f.n, x));
        band.lower.push_back(record_pdf(f.sigma_interval->lo, f.n_interval->lo, x));
        band.upper.push_back(record_pdf(f.sigma_interval->hi, f.n_interval->hi, x));
    }
    return band;
}

std::vector<double> default_forecast_grid() {
    std::vector<double> grid;
    grid.reserve(501);
    for (int i = 0; i <= 500; ++i) grid.push_back(0.05 * i);
    return grid;
}

} // namespace lifetail
