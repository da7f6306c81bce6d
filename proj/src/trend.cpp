#include "lifetail/trend.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "lifetail/numerics.hpp"
#include "lifetail/optimize.hpp"
#include "lifetail/rng.hpp"

namespace lifetail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kZ95 = 1.96;

double centered_intensity(LinkFunction link, double a, double b, double z) {
    const double eta = a + b * z;
    return link == LinkFunction::identity ? eta : std::exp(eta);
}

// Poisson kernel sum N ln mu - mu on centered coordinates; +inf (as a
// minimization value) when an identity-link intensity is nonpositive.
double neg_kernel(const YearlyCounts& data, LinkFunction link, double center,
                  std::span<const double> theta) {
    const double a = theta[0];
    const double b = theta[1];
    CompensatedSum acc;
    for (std::size_t i = 0; i < data.years.size(); ++i) {
        const double z = static_cast<double>(data.years[i]) - center;
        const double mu = centered_intensity(link, a, b, z);
        if (!(mu > 0.0) || !std::isfinite(mu)) return kInf;
        const double n = static_cast<double>(data.counts[i]);
        acc.add(n > 0.0 ? n * std::log(mu) - mu : -mu);
    }
    return -acc.value();
}

// Least-squares line through (z_i, y_i); used only to seed the optimizer.
std::pair<double, double> ls_line(const std::vector<double>& z, const std::vector<double>& y) {
    const double n = static_cast<double>(z.size());
    double zm = 0.0, ym = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        zm += z[i];
        ym += y[i];
    }
    zm /= n;
    ym /= n;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        num += (z[i] - zm) * (y[i] - ym);
        den += (z[i] - zm) * (z[i] - zm);
    }
    const double slope = den > 0.0 ? num / den : 0.0;
    return {ym - slope * zm, slope};
}

} // namespace

void YearlyCounts::validate() const {
    if (years.size() != counts.size()) throw std::invalid_argument("YearlyCounts: years/counts length mismatch");
    if (years.empty()) throw std::invalid_argument("YearlyCounts: empty");
    for (std::size_t i = 1; i < years.size(); ++i) {
        if (years[i] <= years[i - 1]) throw std::invalid_argument("YearlyCounts: years must be strictly increasing");
    }
    for (auto c : counts) {
        if (c < 0) throw std::invalid_argument("YearlyCounts: counts must be nonnegative");
    }
}

const char* link_name(LinkFunction link) {
    return link == LinkFunction::identity ? "identity" : "log";
}

double TrendModel::intensity(double year) const {
    const double eta = intercept + slope * year;
    return link == LinkFunction::identity ? eta : std::exp(eta);
}

TrendModel fit_trend(const YearlyCounts& data, LinkFunction link) {
    data.validate();
    if (data.years.size() < 3) throw std::invalid_argument("fit_trend: need at least 3 years of data");
    if (std::all_of(data.counts.begin(), data.counts.end(), [](auto c) { return c == 0; })) {
        throw std::invalid_argument("fit_trend: all counts are zero");
    }

    const double center = 0.5 * (static_cast<double>(data.years.front()) +
                                 static_cast<double>(data.years.back()));

    std::vector<double> z(data.years.size());
    std::vector<double> y(data.years.size());
    double mean_count = 0.0;
    for (std::size_t i = 0; i < data.years.size(); ++i) {
        z[i] = static_cast<double>(data.years[i]) - center;
        const double c = static_cast<double>(data.counts[i]);
        mean_count += c;
        y[i] = link == LinkFunction::identity ? c : std::log(c + 0.5);
    }
    mean_count /= static_cast<double>(data.years.size());

    auto [a0, b0] = ls_line(z, y);
    if (link == LinkFunction::identity && !(a0 > 0.0)) a0 = std::max(mean_count, 0.5);

    auto objective = [&](std::span<const double> theta) {
        return neg_kernel(data, link, center, theta);
    };

    if (link == LinkFunction::identity &&
        !std::isfinite(objective(std::array<double, 2>{a0, b0}))) {
        // LS seed leaves the feasible region at an edge year; flat start is
        // always feasible because not all counts are zero.
        a0 = std::max(mean_count, 0.5);
        b0 = 0.0;
    }

    const std::array<double, 2> start{a0, b0};
    const std::array<double, 2> step{0.1 * std::max(std::abs(a0), 1.0),
                                     0.1 * std::max(std::abs(b0), 0.1)};
    SimplexOptions options;
    auto res = minimize_simplex(objective, start, step, options);
    if (res.converged) {
        // one polish pass from the incumbent
        const std::array<double, 2> step2{0.02 * std::max(std::abs(res.x[0]), 1.0),
                                          0.02 * std::max(std::abs(res.x[1]), 0.1)};
        SimplexOptions opts2 = options;
        opts2.max_evals = options.max_evals - std::min(options.max_evals, res.evals);
        const auto res2 = minimize_simplex(objective, res.x, step2, opts2);
        if (res2.f <= res.f) res = res2;
    }
    if (!res.converged) throw ConvergenceError("fit_trend: optimizer did not converge");

    const double ac = res.x[0];
    const double b = res.x[1];

    // Observed information on centered coordinates.
    std::array<double, 4> info{};
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double mu = centered_intensity(link, ac, b, z[i]);
        const double w = link == LinkFunction::identity
                             ? static_cast<double>(data.counts[i]) / (mu * mu)
                             : mu;
        info[0] += w;
        info[1] += w * z[i];
        info[2] += w * z[i];
        info[3] += w * z[i] * z[i];
    }
    const auto cov_centered = invert_2x2(info);
    if (!cov_centered) throw std::runtime_error("fit_trend: singular observed information (degenerate design)");

    // Map (a_centered, b) -> (a_original, b) = (a_centered - b*center, b):
    // Sigma_orig = L Sigma_c L^T with L = [[1, -center], [0, 1]].
    const auto& c = *cov_centered;
    std::array<double, 4> cov{};
    cov[0] = c[0] - center * (c[1] + c[2]) + center * center * c[3];
    cov[1] = c[1] - center * c[3];
    cov[2] = c[2] - center * c[3];
    cov[3] = c[3];

    TrendModel m;
    m.link = link;
    m.intercept = ac - b * center;
    m.slope = b;
    m.year_center = center;
    m.covariance = cov;
    m.loglik = -res.f;
    return m;
}

CountEstimate forecast_count(const TrendModel& m, YearRange window, std::uint64_t seed,
                             std::size_t draws) {
    CountEstimate est;
    if (window.empty()) {
        est.ci = {0.0, 0.0};
        return est;
    }

    // Work on centered years; the intercept transform is exact either way but
    // centered sums keep the log-link simulation well conditioned.
    const double ac = m.intercept + m.slope * m.year_center;
    std::vector<double> z;
    z.reserve(static_cast<std::size_t>(window.last - window.first + 1));
    for (int t = window.first; t <= window.last; ++t) {
        z.push_back(static_cast<double>(t) - m.year_center);
    }

    CompensatedSum total;
    for (double zi : z) {
        const double mu = centered_intensity(m.link, ac, m.slope, zi);
        if (m.link == LinkFunction::identity && !(mu > 0.0)) {
            throw std::domain_error("forecast_count: identity-link intensity is nonpositive in the window");
        }
        total.add(mu);
    }
    est.point = total.value();

    // Covariance of (a_centered, slope): undo the centering transform.
    std::array<double, 4> cov_c{};
    cov_c[0] = m.covariance[0] + m.year_center * (m.covariance[1] + m.covariance[2]) +
               m.year_center * m.year_center * m.covariance[3];
    cov_c[1] = m.covariance[1] + m.year_center * m.covariance[3];
    cov_c[2] = m.covariance[2] + m.year_center * m.covariance[3];
    cov_c[3] = m.covariance[3];

    if (m.link == LinkFunction::identity) {
        // Window sum is linear in the coefficients: delta method is exact.
        double g0 = static_cast<double>(z.size());
        double g1 = 0.0;
        for (double zi : z) g1 += zi;
        const double var = g0 * g0 * cov_c[0] + g0 * g1 * (cov_c[1] + cov_c[2]) + g1 * g1 * cov_c[3];
        const double se = std::sqrt(std::max(var, 0.0));
        est.ci = {est.point - kZ95 * se, est.point + kZ95 * se};
        return est;
    }

    // Log link: percentile interval from coefficient draws under the
    // asymptotic normal law (Cholesky of the 2x2 covariance).
    const double l11 = std::sqrt(std::max(cov_c[0], 0.0));
    const double l21 = l11 > 0.0 ? cov_c[2] / l11 : 0.0;
    const double l22 = std::sqrt(std::max(cov_c[3] - l21 * l21, 0.0));

    Rng rng(seed);
    std::vector<double> sums(draws);
    for (std::size_t r = 0; r < draws; ++r) {
        const double u = rng.normal();
        const double v = rng.normal();
        const double ad = ac + l11 * u;
        const double bd = m.slope + l21 * u + l22 * v;
        double s = 0.0;
        for (double zi : z) s += std::exp(ad + bd * zi);
        sums[r] = s;
    }
    std::sort(sums.begin(), sums.end());
    auto percentile = [&](double q) {
        const double pos = q * (static_cast<double>(draws) - 1.0);
        const std::size_t i = static_cast<std::size_t>(pos);
        if (i + 1 >= draws) return sums[draws - 1];
        const double frac = pos - static_cast<double>(i);
        return sums[i] * (1.0 - frac) + sums[i + 1] * frac;
    };
    est.ci = {percentile(0.025), percentile(0.975)};
    return est;
}

CountEstimate scale_count(const CountEstimate& estimate, double ratio) {
    if (!(ratio > 0.0) || !std::isfinite(ratio)) {
        throw std::invalid_argument("scale_count: ratio must be > 0");
    }
    return CountEstimate{estimate.point * ratio, {estimate.ci.lo * ratio, estimate.ci.hi * ratio}};
}

std::vector<YearlyCounts> load_yearly_counts(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_yearly_counts: cannot open '" + path.string() + "'");
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_yearly_counts: empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "year,count,label") {
        throw std::runtime_error("load_yearly_counts: expected header 'year,count,label'");
    }

    std::vector<YearlyCounts> out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string year_s, count_s, label;
        if (!std::getline(ss, year_s, ',') || !std::getline(ss, count_s, ',') ||
            !std::getline(ss, label)) {
            throw std::runtime_error("load_yearly_counts: malformed line " + std::to_string(line_no));
        }
        int year = 0;
        long long count = -1;
        try {
            year = std::stoi(year_s);
            count = std::stoll(count_s);
        } catch (const std::exception&) {
            throw std::runtime_error("load_yearly_counts: bad number on line " + std::to_string(line_no));
        }
        if (count < 0) {
            throw std::runtime_error("load_yearly_counts: negative count on line " + std::to_string(line_no));
        }
        auto it = std::find_if(out.begin(), out.end(),
                               [&](const YearlyCounts& yc) { return yc.label == label; });
        if (it == out.end()) {
            out.push_back(YearlyCounts{{}, {}, label});
            it = out.end() - 1;
        }
        it->years.push_back(year);
        it->counts.push_back(count);
    }
    for (auto& yc : out) yc.validate();
    return out;
}

} // namespace lifetail
