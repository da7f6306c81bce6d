#pragma once

#include <cstdint>
#include <vector>

namespace lifetail {

/// Parameters of a generalized Pareto excess law.
///
/// gamma is the extreme value index: gamma < 0 gives a finite upper endpoint
/// -sigma/gamma, gamma = 0 the exponential sub-model (constant hazard), and
/// gamma > 0 a heavy tail with decreasing hazard. sigma is the scale in years.
struct GpParams {
    double gamma = 0.0;
    double sigma = 1.0;

    /// Upper support endpoint: -sigma/gamma for gamma < 0, +infinity otherwise.
    double upper_endpoint() const;

    bool valid() const;
    void validate() const; // throws std::invalid_argument
};

/// |gamma| at or below this uses the exponential closed forms. The band is
/// inclusive so the gamma->0 limit is exact throughout it.
inline constexpr double kGammaExponentialBand = 1e-8;

/// G(x) = 1 - (1 + gamma x / sigma)_+^{-1/gamma}; exponential limit inside the band.
double gp_cdf(const GpParams& p, double x);

/// Survival 1 - G(x). Exact 1.0 at x = 0; accepts x = +infinity (returns 0).
double gp_survival(const GpParams& p, double x);

/// Density g(x); returns 0 outside the support rather than raising so that
/// likelihoods of boundary observations degrade to -infinity instead of failing.
double gp_pdf(const GpParams& p, double x);

/// log g(x); -infinity outside the support.
double gp_log_pdf(const GpParams& p, double x);

/// Force of mortality (1 + gamma x / sigma)^{-1} / sigma on the support
/// interior. Throws std::domain_error at or beyond a finite endpoint.
double gp_hazard(const GpParams& p, double x);

/// Inverse of gp_cdf for q in [0, 1).
double gp_quantile(const GpParams& p, double q);

/// Inverse-cdf sampling; deterministic and bit-reproducible for a given seed.
std::vector<double> gp_sample(const GpParams& p, std::size_t count, std::uint64_t seed);

/// Expected maximum of n iid exponentials with mean sigma: sigma * H_n.
/// Exact harmonic sum for n up to 1e6, Euler-Maclaurin expansion beyond.
double mean_max_exponential(double sigma, std::uint64_t n);

} // namespace lifetail
