#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lifetail/interval.hpp"

namespace lifetail {

/// Yearly exceedance-death counts for one country set.
struct YearlyCounts {
    std::vector<int> years;           // strictly increasing
    std::vector<std::int64_t> counts; // nonnegative
    std::string label;

    void validate() const; // throws std::invalid_argument
};

enum class LinkFunction { identity, log };

const char* link_name(LinkFunction link);

/// Poisson regression of counts on calendar year.
///
/// Intensity mu_t = intercept + slope * t (identity link) or
/// exp(intercept + slope * t) (log link). Coefficients are reported on the
/// original year scale; year_center records the midpoint the fit was
/// conditioned on. covariance is row-major (intercept, slope) on the original
/// scale; loglik is the Poisson kernel sum N_t ln mu_t - mu_t.
struct TrendModel {
    LinkFunction link = LinkFunction::identity;
    double intercept = 0.0;
    double slope = 0.0;
    double year_center = 0.0;
    std::array<double, 4> covariance{};
    double loglik = 0.0;

    double intensity(double year) const;
};

/// Maximum-likelihood Poisson fit. The year covariate is centered at the
/// midpoint of the observed range before optimization; identity-link
/// intensities are kept positive by a hard feasibility barrier.
/// Requires >= 3 years of data and at least one nonzero count.
TrendModel fit_trend(const YearlyCounts& data, LinkFunction link);

/// Inclusive calendar-year range; empty when last < first.
struct YearRange {
    int first = 0;
    int last = -1;

    bool empty() const { return last < first; }
};

struct CountEstimate {
    double point = 0.0;
    Interval ci;
};

inline constexpr std::uint64_t kForecastDefaultSeed = 42;
inline constexpr std::size_t kForecastDraws = 100000;

/// Expected death count over a (typically future) year window.
/// Identity link: delta-method interval (the window sum is linear in the
/// coefficients). Log link: percentile interval from `draws` simulations of
/// the coefficients under their asymptotic normal law, deterministic for a
/// given seed. Throws std::domain_error when an identity-link intensity is
/// nonpositive anywhere in the window.
CountEstimate forecast_count(const TrendModel& m, YearRange window,
                             std::uint64_t seed = kForecastDefaultSeed,
                             std::size_t draws = kForecastDraws);

/// Multiplies the point and both interval endpoints by ratio (> 0); any
/// rounding to whole counts happens at presentation, not here.
CountEstimate scale_count(const CountEstimate& estimate, double ratio);

/// Reads a "year,count,label" CSV; one YearlyCounts per label, in first-seen
/// order. Throws on malformed rows.
std::vector<YearlyCounts> load_yearly_counts(const std::filesystem::path& path);

} // namespace lifetail
