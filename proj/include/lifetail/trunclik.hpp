#pragma once

#include <span>

#include "lifetail/evd.hpp"

namespace lifetail {

/// Calendar interval (begin, end) of observed deaths, in fractional years.
/// The window is half-open: a death at exactly `end` is outside it.
/// Infinite endpoints are allowed and model an untruncated sample.
struct SamplingWindow {
    double begin = 0.0;
    double end = 0.0;

    double width() const { return end - begin; }
    bool valid() const;
    void validate() const; // throws std::invalid_argument
};

/// One exceedance record under window sampling: the subject crossed the
/// threshold age at calendar time `crossing_time` and lived `excess` more
/// years, and is in the sample because the death date landed in `window`.
struct TruncatedObservation {
    double crossing_time = 0.0;
    double excess = 0.0;
    SamplingWindow window;

    double death_time() const { return crossing_time + excess; }

    /// Inclusion constraint of the sampling scheme: either the crossing
    /// happened before the window opened and the death falls inside it, or
    /// the crossing happened inside and the death came before the close.
    bool satisfies_inclusion() const;
    void validate() const; // throws std::invalid_argument
};

/// Log-likelihood contribution of one observation:
///   log f(x_i) - log( F(e - t_i) - F(max(b - t_i, 0)) ).
/// The max() folds the two sampling cases into one expression since F has no
/// mass below zero. Throws std::domain_error when the window carries no
/// probability mass under p (degenerate window), std::invalid_argument when
/// the observation violates its inclusion constraint. Returns -infinity when
/// the excess itself lies outside the support of p.
double log_contribution(const TruncatedObservation& obs, const GpParams& p);

/// Sum of log contributions with compensated summation. Parameter values
/// that make any contribution undefined yield -infinity (the optimizer
/// treats them as rejected moves); invalid observations or an empty sample
/// throw std::invalid_argument.
double total_loglik(std::span<const TruncatedObservation> sample, const GpParams& p);

namespace detail {
/// As log_contribution, but maps all parameter-induced degeneracies to
/// -infinity instead of throwing. The observation must already be valid.
double log_contribution_unchecked(const TruncatedObservation& obs, const GpParams& p);
} // namespace detail

} // namespace lifetail
