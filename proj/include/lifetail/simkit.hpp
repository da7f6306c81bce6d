#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lifetail/hypotest.hpp"
#include "lifetail/trunclik.hpp"

namespace lifetail {

/// Threshold-crossing arrival model: intensity linear in time over
/// [window.begin - lookback, window.end). rate_end > rate_start gives the
/// increasing-arrivals regime that drives the sampling bias.
struct ArrivalModel {
    double rate_start = 1.0;
    double rate_end = 1.0;
    double lookback = 30.0;

    void validate() const;
};

enum class SamplingScheme {
    death_in_window,         // included iff the death date lands in [b, e)
    alive_at_begin_dead_by_end // crossed before b, alive at b, dead before e
};

const char* scheme_name(SamplingScheme s);

struct SchemeScenario {
    GpParams true_params;
    ArrivalModel arrivals;
    SamplingWindow window; // must be finite
    SamplingScheme scheme = SamplingScheme::death_in_window;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Raised when the candidate-draw budget (1000x the target count) runs out
/// before enough observations pass the inclusion filter.
class BudgetError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kDrawBudgetFactor = 1000;

/// Simulates candidate lives (crossing time from the arrival model, excess
/// from true_params) and keeps the first target_count that pass the scheme's
/// inclusion filter. Pure function of (scenario, target_count).
std::vector<TruncatedObservation> simulate_scheme(const SchemeScenario& s, std::size_t target_count);

/// Exponential sample with effectively infinite windows (no truncation);
/// convenience for calibration studies and power runs.
std::vector<TruncatedObservation> untruncated_sample(const GpParams& p, std::size_t count,
                                                     std::uint64_t seed);

/// Copy of a sample with the windows widened to infinity: what a naive,
/// truncation-ignoring fit sees.
std::vector<TruncatedObservation> without_truncation(std::span<const TruncatedObservation> obs);

struct PowerResult {
    double power = 0.0;
    double std_error = 0.0;
    std::size_t reps = 0;
    std::size_t rejections = 0;
    double implied_sigma = 0.0; // scale of the shifted-survival alternative
};

/// Power of the Wald comparison for detecting a yearly-survival increase of
/// `delta` (absolute, e.g. 0.05) over exp(-1/base_sigma), with two simulated
/// arms of sample_size each per replication. delta = 0 estimates the size.
PowerResult power_survival_increase(double base_sigma, std::size_t sample_size, double delta,
                                    double level, std::size_t reps, std::uint64_t seed);

using DatasetGenerator = std::function<std::vector<TruncatedObservation>(std::uint64_t rep_seed)>;
using TestRunner = std::function<TestReport(const std::vector<TruncatedObservation>&)>;

struct CalibrationResult {
    std::vector<double> p_values;
    std::optional<double> ks_uniform; // absent when fewer than 2 p-values
    std::size_t failures = 0;
};

/// Runs `test` on `reps` datasets drawn from `generator` (one derived seed per
/// replication) and summarizes the p-value sample. Individual replication
/// failures are tolerated up to a 1% budget, then the study itself fails.
CalibrationResult calibration_study(const DatasetGenerator& generator, const TestRunner& test,
                                    std::size_t reps, std::uint64_t seed);

/// Exponential QQ-plot coordinates at scale sigma: sorted excesses paired
/// with -sigma * ln(1 - i/(n+1)), i = 1..n. Data that are exactly those
/// quantiles land exactly on the diagonal.
std::vector<std::pair<double, double>> exponential_qq_points(std::vector<double> excesses,
                                                             double sigma);

/// QQ-bend summary: least-squares slope of the upper half of the exponential
/// QQ plot minus the slope of the lower half. Straight plots give ~0;
/// the alive-at-begin scheme bends the top down (negative values).
double qq_bend_statistic(std::vector<double> excesses, double sigma);

} // namespace lifetail
