#include "lifetail/trunclik.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lifetail/numerics.hpp"

namespace lifetail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
} // namespace

bool SamplingWindow::valid() const {
    return !std::isnan(begin) && !std::isnan(end) && begin < end;
}

void SamplingWindow::validate() const {
    if (!valid()) throw std::invalid_argument("SamplingWindow: requires begin < end");
}

bool TruncatedObservation::satisfies_inclusion() const {
    if (std::isnan(crossing_time) || !(excess >= 0.0)) return false;
    const double death = death_time();
    if (crossing_time <= window.begin) {
        return window.begin <= death && death < window.end;
    }
    return death < window.end;
}

void TruncatedObservation::validate() const {
    window.validate();
    if (std::isnan(crossing_time) || std::isinf(crossing_time)) {
        throw std::invalid_argument("TruncatedObservation: crossing_time must be finite");
    }
    if (!(excess >= 0.0) || std::isinf(excess)) {
        throw std::invalid_argument("TruncatedObservation: excess must be finite and >= 0");
    }
    if (!satisfies_inclusion()) {
        throw std::invalid_argument("TruncatedObservation: death date violates the window inclusion constraint");
    }
}

namespace detail {

double log_contribution_unchecked(const TruncatedObservation& obs, const GpParams& p) {
    // Truncation bounds relative to the crossing time. F has no mass below
    // zero, so flooring the left bound at 0 folds the crossed-before-window
    // and crossed-inside-window cases into one formula.
    const double lo = std::max(obs.window.begin - obs.crossing_time, 0.0);
    const double hi = obs.window.end - obs.crossing_time;
    const double mass = gp_survival(p, lo) - gp_survival(p, hi);
    if (!(mass > 0.0)) return -kInf;
    const double lp = gp_log_pdf(p, obs.excess);
    if (lp == -kInf) return -kInf;
    return lp - std::log(mass);
}

} // namespace detail

double log_contribution(const TruncatedObservation& obs, const GpParams& p) {
    obs.validate();
    p.validate();
    const double lo = std::max(obs.window.begin - obs.crossing_time, 0.0);
    const double hi = obs.window.end - obs.crossing_time;
    const double mass = gp_survival(p, lo) - gp_survival(p, hi);
    if (!(mass > 0.0)) {
        throw std::domain_error("log_contribution: sampling window carries no probability mass under these parameters");
    }
    const double lp = gp_log_pdf(p, obs.excess);
    return lp == -kInf ? -kInf : lp - std::log(mass);
}

double total_loglik(std::span<const TruncatedObservation> sample, const GpParams& p) {
    if (sample.empty()) throw std::invalid_argument("total_loglik: empty sample");
    p.validate();
    for (const auto& obs : sample) obs.validate();
    CompensatedSum acc;
    for (const auto& obs : sample) {
        const double c = detail::log_contribution_unchecked(obs, p);
        if (c == -kInf) return -kInf;
        acc.add(c);
    }
    return acc.value();
}

} // namespace lifetail
