#include "lifetail/hypotest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lifetail/stats.hpp"

namespace lifetail {

namespace {

FitResult fit_named(std::span<const TruncatedObservation> obs, Model model, const std::string& label) {
    try {
        return fit_gp(obs, model);
    } catch (const std::exception& e) {
        throw std::runtime_error("fit for group '" + label + "' failed: " + e.what());
    }
}

int params_per_group(Model model) { return model == Model::gp ? 2 : 1; }

} // namespace

TestReport lr_test_groups(std::span<const LabeledSample> samples, Model model) {
    if (samples.size() < 2) throw std::invalid_argument("lr_test_groups: need at least two groups");

    TestReport report;
    report.strategy = model;

    double sum_separate = 0.0;
    std::vector<TruncatedObservation> pooled;
    for (const auto& g : samples) {
        if (g.obs.empty()) throw std::invalid_argument("lr_test_groups: group '" + g.label + "' is empty");
        report.groups.push_back(g.label);
        sum_separate += fit_named(g.obs, model, g.label).loglik;
        pooled.insert(pooled.end(), g.obs.begin(), g.obs.end());
    }
    const FitResult pooled_fit = fit_named(pooled, model, "pooled");

    report.statistic = std::max(2.0 * (sum_separate - pooled_fit.loglik), 0.0);
    report.df = static_cast<int>(samples.size() - 1) * params_per_group(model);
    report.p_value = chi_squared_sf(report.statistic, report.df);
    return report;
}

TestReport lr_test_exponential(std::span<const TruncatedObservation> sample) {
    if (sample.empty()) throw std::invalid_argument("lr_test_exponential: empty sample");
    const FitResult gp = fit_named(sample, Model::gp, "gp");
    const FitResult exp_fit = fit_named(sample, Model::exponential, "exponential");

    TestReport report;
    report.strategy = Model::gp;
    report.statistic = std::max(2.0 * (gp.loglik - exp_fit.loglik), 0.0);
    report.df = 1;
    report.p_value = chi_squared_sf(report.statistic, report.df);
    report.groups = {"gp", "exponential"};
    return report;
}

TestReport wald_test_halves(const FitResult& first, const FitResult& second) {
    if (first.model != Model::exponential || second.model != Model::exponential) {
        throw std::invalid_argument("wald_test_halves: both fits must use the exponential model");
    }
    const auto se1 = first.se_sigma();
    const auto se2 = second.se_sigma();
    if (!se1 || !se2 || !(*se1 > 0.0) || !(*se2 > 0.0)) {
        throw std::invalid_argument("wald_test_halves: fits are missing usable standard errors");
    }

    TestReport report;
    report.strategy = Model::exponential;
    report.df = 0;
    report.statistic = (first.params.sigma - second.params.sigma) /
                       std::sqrt(*se1 * *se1 + *se2 * *se2);
    report.p_value = 2.0 * normal_cdf(-std::abs(report.statistic));
    report.groups = {"first half", "second half"};
    return report;
}

} // namespace lifetail
