#pragma once

#include <array>
#include <optional>
#include <span>

#include "lifetail/interval.hpp"
#include "lifetail/optimize.hpp"
#include "lifetail/trunclik.hpp"

namespace lifetail {

enum class Model { gp, exponential };

const char* model_name(Model m);

/// Gamma values outside [-kGammaSearchBound, kGammaSearchBound] are rejected
/// during the likelihood search.
inline constexpr double kGammaSearchBound = 5.0;

/// Maximum-likelihood fit of the excess law under window truncation.
///
/// covariance is the inverse observed information on the (gamma, sigma) scale
/// (1x1 in slot [0] for the exponential model). When the information matrix is
/// singular or indefinite to within eigenvalue ratio 1e-10, hessian_unstable
/// is set and covariance/intervals are absent.
struct FitResult {
    Model model = Model::gp;
    GpParams params;
    double loglik = 0.0;
    std::size_t n_obs = 0;
    bool converged = false;
    bool hessian_unstable = false;
    std::optional<std::array<double, 4>> covariance;
    std::optional<Interval> ci_gamma; // absent for the exponential model
    std::optional<Interval> ci_sigma;

    std::optional<double> se_gamma() const;
    std::optional<double> se_sigma() const;
};

/// Thrown when the likelihood search exhausts its evaluation budget; carries
/// the best point found.
class FitConvergenceError : public ConvergenceError {
  public:
    FitConvergenceError(const std::string& msg, FitResult best_point)
        : ConvergenceError(msg), best(std::move(best_point)) {}
    FitResult best;
};

/// Maximizes total_loglik over (gamma, log sigma), or over log sigma alone for
/// the exponential model. Simplex search (no derivatives), starting point
/// gamma = 0, sigma = mean excess; restarts from the incumbent until the
/// 10,000-evaluation budget or no further improvement.
FitResult fit_gp(std::span<const TruncatedObservation> sample, Model model);

/// Observed information: central finite differences of -total_loglik on the
/// (gamma, sigma) scale, relative step 1e-4. For the exponential model only
/// slot [0] (sigma) is populated.
std::array<double, 4> observed_information(std::span<const TruncatedObservation> sample,
                                           const GpParams& p, Model model);

struct SurvivalEstimate {
    double point = 0.0;
    std::optional<Interval> ci;
};

/// Yearly survival probability exp(-1/sigma) for an exponential-model fit,
/// with the confidence interval mapped through the same monotone transform.
SurvivalEstimate survival_one_year(const FitResult& fr);

} // namespace lifetail
