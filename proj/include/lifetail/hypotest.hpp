#pragma once

#include <span>
#include <string>
#include <vector>

#include "lifetail/fit.hpp"

namespace lifetail {

/// Outcome of one hypothesis test. df is 0 for the Wald test (not a
/// chi-square test). For likelihood ratio tests the statistic is clipped at 0.
struct TestReport {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
    Model strategy = Model::exponential;
    std::vector<std::string> groups;
};

struct LabeledSample {
    std::string label;
    std::vector<TruncatedObservation> obs;
};

/// Likelihood ratio test of "one common law across groups" against
/// "separate laws per group", under the given model. df = (G-1) * k with
/// k = 2 for gp and k = 1 for exponential.
TestReport lr_test_groups(std::span<const LabeledSample> samples, Model model);

/// Likelihood ratio test of the exponential sub-model (gamma = 0) against the
/// full gp model; chi-square with one degree of freedom.
TestReport lr_test_exponential(std::span<const TruncatedObservation> sample);

/// Two-sided Wald test of equal exponential scale between two fits:
/// z = (sigma1 - sigma2) / sqrt(se1^2 + se2^2). Both fits must be
/// exponential-model fits carrying standard errors.
TestReport wald_test_halves(const FitResult& first, const FitResult& second);

} // namespace lifetail
