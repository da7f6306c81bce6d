#include "lifetail/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lifetail/rng.hpp"
#include "lifetail/stats.hpp"

namespace lifetail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// Inverse cdf of an arrival time on [0,1] (normalized interval) with
// intensity linear from r0 to r1.
double arrival_position(double r0, double r1, double u) {
    const double d = r1 - r0;
    if (d == 0.0) return u;
    const double total = r0 + 0.5 * d;
    // solve (d/2) s^2 + r0 s - u*total = 0 for s in [0,1]
    const double disc = r0 * r0 + 2.0 * d * u * total;
    return (-r0 + std::sqrt(std::max(disc, 0.0))) / d;
}

bool included(SamplingScheme scheme, const SamplingWindow& w, double t, double x) {
    const double death = t + x;
    switch (scheme) {
        case SamplingScheme::death_in_window:
            return w.begin <= death && death < w.end;
        case SamplingScheme::alive_at_begin_dead_by_end:
            return t <= w.begin && death >= w.begin && death < w.end;
    }
    return false;
}

} // namespace

void ArrivalModel::validate() const {
    if (!(rate_start >= 0.0) || !(rate_end >= 0.0) || rate_start + rate_end <= 0.0) {
        throw std::invalid_argument("ArrivalModel: rates must be nonnegative and not both zero");
    }
    if (!(lookback > 0.0) || !std::isfinite(lookback)) {
        throw std::invalid_argument("ArrivalModel: lookback must be positive and finite");
    }
}

const char* scheme_name(SamplingScheme s) {
    return s == SamplingScheme::death_in_window ? "death-in-window" : "alive-at-begin-dead-by-end";
}

void SchemeScenario::validate() const {
    true_params.validate();
    arrivals.validate();
    window.validate();
    if (std::isinf(window.begin) || std::isinf(window.end)) {
        throw std::invalid_argument("SchemeScenario: window must be finite");
    }
}

std::vector<TruncatedObservation> simulate_scheme(const SchemeScenario& s, std::size_t target_count) {
    s.validate();
    std::vector<TruncatedObservation> out;
    out.reserve(target_count);
    if (target_count == 0) return out;

    const double a0 = s.window.begin - s.arrivals.lookback;
    const double span = s.window.end - a0;
    const std::size_t budget = kDrawBudgetFactor * target_count;

    Rng rng(s.seed);
    for (std::size_t draw = 0; draw < budget && out.size() < target_count; ++draw) {
        const double pos = arrival_position(s.arrivals.rate_start, s.arrivals.rate_end, rng.uniform01());
        const double t = a0 + pos * span;
        const double x = gp_quantile(s.true_params, rng.uniform01());
        if (included(s.scheme, s.window, t, x)) {
            out.push_back({t, x, s.window});
        }
    }
    if (out.size() < target_count) {
        throw BudgetError("simulate_scheme: draw budget exhausted (inclusion probability too low)");
    }
    return out;
}

std::vector<TruncatedObservation> untruncated_sample(const GpParams& p, std::size_t count,
                                                     std::uint64_t seed) {
    const auto excesses = gp_sample(p, count, seed);
    std::vector<TruncatedObservation> out;
    out.reserve(count);
    const SamplingWindow whole{-kInf, kInf};
    for (double x : excesses) out.push_back({0.0, x, whole});
    return out;
}

std::vector<TruncatedObservation> without_truncation(std::span<const TruncatedObservation> obs) {
    std::vector<TruncatedObservation> out(obs.begin(), obs.end());
    for (auto& o : out) o.window = SamplingWindow{-kInf, kInf};
    return out;
}

PowerResult power_survival_increase(double base_sigma, std::size_t sample_size, double delta,
                                    double level, std::size_t reps, std::uint64_t seed) {
    if (!(base_sigma > 0.0)) throw std::invalid_argument("power_survival_increase: base sigma must be > 0");
    if (delta < 0.0) throw std::invalid_argument("power_survival_increase: delta must be >= 0");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("power_survival_increase: level must be in (0,1)");
    if (reps < 100) throw std::invalid_argument("power_survival_increase: need at least 100 replications");
    if (sample_size < 2) throw std::invalid_argument("power_survival_increase: sample size too small");

    const double base_survival = std::exp(-1.0 / base_sigma);
    const double new_survival = base_survival + delta;
    if (new_survival >= 1.0) {
        throw std::domain_error("power_survival_increase: implied yearly survival reaches 1");
    }
    const double new_sigma = -1.0 / std::log(new_survival);

    const GpParams base{0.0, base_sigma};
    const GpParams shifted{0.0, new_sigma};

    std::size_t rejections = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        const auto arm_base = untruncated_sample(base, sample_size, Rng::derive_stream(seed, 2 * r));
        const auto arm_new = untruncated_sample(shifted, sample_size, Rng::derive_stream(seed, 2 * r + 1));
        const auto fit_base = fit_gp(arm_base, Model::exponential);
        const auto fit_new = fit_gp(arm_new, Model::exponential);
        const auto test = wald_test_halves(fit_base, fit_new);
        if (test.p_value < level) ++rejections;
    }

    PowerResult res;
    res.reps = reps;
    res.rejections = rejections;
    res.power = static_cast<double>(rejections) / static_cast<double>(reps);
    res.std_error = std::sqrt(res.power * (1.0 - res.power) / static_cast<double>(reps));
    res.implied_sigma = new_sigma;
    return res;
}

CalibrationResult calibration_study(const DatasetGenerator& generator, const TestRunner& test,
                                    std::size_t reps, std::uint64_t seed) {
    if (reps == 0) throw std::invalid_argument("calibration_study: reps must be >= 1");
    CalibrationResult out;
    out.p_values.reserve(reps);
    const std::size_t failure_budget = std::max<std::size_t>(1, reps / 100);
    for (std::size_t r = 0; r < reps; ++r) {
        try {
            const auto data = generator(Rng::derive_stream(seed, r));
            out.p_values.push_back(test(data).p_value);
        } catch (const std::exception&) {
            ++out.failures;
            if (out.failures > failure_budget) {
                throw std::runtime_error("calibration_study: replication failure budget exceeded");
            }
        }
    }
    if (out.p_values.size() >= 2) {
        out.ks_uniform = ks_distance_uniform(out.p_values);
    }
    return out;
}

std::vector<std::pair<double, double>> exponential_qq_points(std::vector<double> excesses,
                                                             double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("exponential_qq_points: sigma must be > 0");
    if (excesses.empty()) throw std::invalid_argument("exponential_qq_points: no data");
    std::sort(excesses.begin(), excesses.end());
    const double n = static_cast<double>(excesses.size());
    std::vector<std::pair<double, double>> pts;
    pts.reserve(excesses.size());
    for (std::size_t i = 0; i < excesses.size(); ++i) {
        const double theo = -sigma * std::log1p(-static_cast<double>(i + 1) / (n + 1.0));
        pts.emplace_back(theo, excesses[i]);
    }
    return pts;
}

double qq_bend_statistic(std::vector<double> excesses, double sigma) {
    if (excesses.size() < 4) throw std::invalid_argument("qq_bend_statistic: need at least 4 points");
    const auto pts = exponential_qq_points(std::move(excesses), sigma);

    // Least-squares slope of observed vs theoretical quantiles over [lo, hi).
    auto half_slope = [&](std::size_t lo, std::size_t hi) {
        double tx = 0.0, ty = 0.0;
        const double m = static_cast<double>(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            tx += pts[i].first;
            ty += pts[i].second;
        }
        tx /= m;
        ty /= m;
        double num = 0.0, den = 0.0;
        for (std::size_t i = lo; i < hi; ++i) {
            num += (pts[i].first - tx) * (pts[i].second - ty);
            den += (pts[i].first - tx) * (pts[i].first - tx);
        }
        return num / den;
    };

    const std::size_t mid = pts.size() / 2;
    return half_slope(mid, pts.size()) - half_slope(0, mid);
}

} // namespace lifetail
