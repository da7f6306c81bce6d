#include "lifetail/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lifetail/numerics.hpp"

namespace lifetail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEigenRatioFloor = 1e-10; // below this the information is treated as singular
constexpr double kZ95 = 1.96;

double mean_excess(std::span<const TruncatedObservation> sample) {
    CompensatedSum s;
    for (const auto& o : sample) s.add(o.excess);
    return s.value() / static_cast<double>(sample.size());
}

// Objective on the search scale: u = (gamma, log sigma) for gp, (log sigma)
// for the exponential model. Returns -loglik; +inf marks infeasible points.
double neg_loglik_on_search_scale(std::span<const TruncatedObservation> sample, Model model,
                                  std::span<const double> u) {
    GpParams p;
    if (model == Model::gp) {
        p.gamma = u[0];
        p.sigma = std::exp(u[1]);
    } else {
        p.gamma = 0.0;
        p.sigma = std::exp(u[0]);
    }
    if (std::abs(p.gamma) > kGammaSearchBound || !(p.sigma > 0.0) || !std::isfinite(p.sigma)) {
        return kInf;
    }
    const double ll = total_loglik(sample, p);
    return ll == -kInf ? kInf : -ll;
}
} // namespace

const char* model_name(Model m) { return m == Model::gp ? "gp" : "exponential"; }

std::optional<double> FitResult::se_gamma() const {
    if (!covariance || model != Model::gp) return std::nullopt;
    return std::sqrt((*covariance)[0]);
}

std::optional<double> FitResult::se_sigma() const {
    if (!covariance) return std::nullopt;
    const double var = model == Model::gp ? (*covariance)[3] : (*covariance)[0];
    return std::sqrt(var);
}

std::array<double, 4> observed_information(std::span<const TruncatedObservation> sample,
                                           const GpParams& p, Model model) {
    p.validate();
    if (sample.empty()) throw std::invalid_argument("observed_information: empty sample");

    auto neg_ll = [&](std::span<const double> theta) {
        GpParams q;
        q.gamma = model == Model::gp ? theta[0] : 0.0;
        q.sigma = model == Model::gp ? theta[1] : theta[0];
        if (!(q.sigma > 0.0)) return kInf;
        const double ll = total_loglik(sample, q);
        return ll == -kInf ? kInf : -ll;
    };

    std::array<double, 4> info{};
    if (model == Model::gp) {
        const std::array<double, 2> theta{p.gamma, p.sigma};
        const auto h = hessian_fd(neg_ll, theta);
        info = {h[0], h[1], h[2], h[3]};
    } else {
        const std::array<double, 1> theta{p.sigma};
        const auto h = hessian_fd(neg_ll, theta);
        info[0] = h[0];
    }
    return info;
}

namespace {

// Inverts the observed information when it is numerically positive definite;
// otherwise flags the result unstable (the table-rendering layer shows N/A).
void attach_covariance(FitResult& fr, std::span<const TruncatedObservation> sample) {
    const auto info = observed_information(sample, fr.params, fr.model);
    if (fr.model == Model::exponential) {
        const double i0 = info[0];
        if (!std::isfinite(i0) || i0 <= 0.0) {
            fr.hessian_unstable = true;
            return;
        }
        fr.covariance = std::array<double, 4>{1.0 / i0, 0.0, 0.0, 0.0};
    } else {
        for (double v : info) {
            if (!std::isfinite(v)) {
                fr.hessian_unstable = true;
                return;
            }
        }
        const auto eig = sym_eigenvalues_2x2(info);
        if (!(eig[0] > 0.0) || eig[0] < kEigenRatioFloor * eig[1]) {
            fr.hessian_unstable = true;
            return;
        }
        fr.covariance = invert_2x2(info).value();
    }

    const auto seg = fr.se_gamma();
    const auto ses = fr.se_sigma();
    if (ses && std::isfinite(*ses)) {
        const double lo = fr.params.sigma - kZ95 * *ses;
        // parameter space is sigma > 0
        fr.ci_sigma = Interval{std::max(lo, std::numeric_limits<double>::min()),
                               fr.params.sigma + kZ95 * *ses};
    } else if (fr.model == Model::exponential) {
        fr.hessian_unstable = true;
        fr.covariance.reset();
        return;
    }
    if (fr.model == Model::gp) {
        if (seg && std::isfinite(*seg)) {
            fr.ci_gamma = Interval{fr.params.gamma - kZ95 * *seg, fr.params.gamma + kZ95 * *seg};
        } else {
            fr.hessian_unstable = true;
            fr.covariance.reset();
            fr.ci_sigma.reset();
        }
    }
}

} // namespace

FitResult fit_gp(std::span<const TruncatedObservation> sample, Model model) {
    if (sample.empty()) throw std::invalid_argument("fit_gp: empty sample");
    for (const auto& obs : sample) obs.validate();

    const double sigma0 = std::max(mean_excess(sample), 1e-8);
    std::vector<double> start;
    std::vector<double> step;
    if (model == Model::gp) {
        start = {0.0, std::log(sigma0)};
        step = {0.1, 0.25};
    } else {
        start = {std::log(sigma0)};
        step = {0.25};
    }

    auto objective = [&](std::span<const double> u) {
        return neg_loglik_on_search_scale(sample, model, u);
    };

    SimplexOptions options;
    SimplexResult best;
    best.f = kInf;
    std::size_t used = 0;
    bool converged = false;
    // Restart from the incumbent with a tighter simplex until no improvement;
    // everything stays inside the overall evaluation budget.
    for (int round = 0; round < 4 && used < options.max_evals; ++round) {
        SimplexOptions opts = options;
        opts.max_evals = options.max_evals - used;
        const auto res = minimize_simplex(objective, start, step, opts);
        used += res.evals;
        const bool improved = res.f < best.f - 1e-12;
        if (res.f < best.f) {
            best = res;
            converged = res.converged;
        }
        if (!improved && round > 0) break;
        start = best.x;
        for (double& s : step) s *= 0.2;
    }

    FitResult fr;
    fr.model = model;
    fr.n_obs = sample.size();
    if (model == Model::gp) {
        fr.params.gamma = best.x[0];
        fr.params.sigma = std::exp(best.x[1]);
    } else {
        fr.params.gamma = 0.0;
        fr.params.sigma = std::exp(best.x[0]);
    }
    fr.loglik = -best.f;
    fr.converged = converged;

    if (!converged) {
        throw FitConvergenceError("fit_gp: evaluation budget exhausted before convergence", fr);
    }

    attach_covariance(fr, sample);
    return fr;
}

SurvivalEstimate survival_one_year(const FitResult& fr) {
    if (fr.model != Model::exponential) {
        throw std::invalid_argument("survival_one_year: requires an exponential-model fit");
    }
    SurvivalEstimate s;
    s.point = std::exp(-1.0 / fr.params.sigma);
    if (fr.ci_sigma) {
        s.ci = Interval{std::exp(-1.0 / fr.ci_sigma->lo), std::exp(-1.0 / fr.ci_sigma->hi)};
    }
    return s;
}

} // namespace lifetail
