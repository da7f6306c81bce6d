#include "lifetail/evd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "lifetail/rng.hpp"

namespace lifetail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool in_exponential_band(double gamma) { return std::abs(gamma) <= kGammaExponentialBand; }

void require_finite_nonneg(double x, const char* what) {
    if (std::isnan(x) || x < 0.0) {
        throw std::domain_error(std::string(what) + " must be a nonnegative number");
    }
}
} // namespace

double GpParams::upper_endpoint() const {
    return gamma < 0.0 ? -sigma / gamma : kInf;
}

bool GpParams::valid() const {
    return std::isfinite(gamma) && std::isfinite(sigma) && sigma > 0.0;
}

void GpParams::validate() const {
    if (!valid()) throw std::invalid_argument("GpParams: sigma must be > 0 and both parameters finite");
}

double gp_survival(const GpParams& p, double x) {
    p.validate();
    if (std::isnan(x) || x < 0.0) throw std::domain_error("gp_survival: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (x == kInf) return 0.0;
    if (in_exponential_band(p.gamma)) return std::exp(-x / p.sigma);
    const double z = p.gamma * x / p.sigma;
    if (z <= -1.0) return 0.0; // at or beyond the finite endpoint
    return std::exp(-std::log1p(z) / p.gamma);
}

double gp_cdf(const GpParams& p, double x) {
    if (!std::isfinite(x)) throw std::domain_error("gp_cdf: x must be finite");
    return 1.0 - gp_survival(p, x);
}

double gp_log_pdf(const GpParams& p, double x) {
    p.validate();
    if (std::isnan(x)) throw std::domain_error("gp_log_pdf: x is NaN");
    if (x < 0.0 || x == kInf) return -kInf;
    if (in_exponential_band(p.gamma)) return -x / p.sigma - std::log(p.sigma);
    const double z = p.gamma * x / p.sigma;
    if (z < -1.0) return -kInf; // beyond the endpoint
    const double expo = -1.0 / p.gamma - 1.0;
    if (z == -1.0) {
        // Boundary of a finite-endpoint law: density is 0, 1/sigma, or
        // +infinity depending on the sign of the exponent.
        if (expo > 0.0) return -kInf;
        if (expo == 0.0) return -std::log(p.sigma);
        return kInf;
    }
    return expo * std::log1p(z) - std::log(p.sigma);
}

double gp_pdf(const GpParams& p, double x) {
    return std::exp(gp_log_pdf(p, x));
}

double gp_hazard(const GpParams& p, double x) {
    p.validate();
    require_finite_nonneg(x, "x");
    if (in_exponential_band(p.gamma)) return 1.0 / p.sigma;
    const double z = p.gamma * x / p.sigma;
    if (z <= -1.0) throw std::domain_error("gp_hazard: x at or beyond the support endpoint");
    return 1.0 / (p.sigma * (1.0 + z));
}

double gp_quantile(const GpParams& p, double q) {
    p.validate();
    if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("gp_quantile: q must lie in [0, 1)");
    const double l = std::log1p(-q); // log(1 - q), <= 0
    if (in_exponential_band(p.gamma)) return -p.sigma * l;
    return p.sigma * std::expm1(-p.gamma * l) / p.gamma;
}

std::vector<double> gp_sample(const GpParams& p, std::size_t count, std::uint64_t seed) {
    p.validate();
    std::vector<double> out;
    out.reserve(count);
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i) {
        out.push_back(gp_quantile(p, rng.uniform01()));
    }
    return out;
}

double mean_max_exponential(double sigma, std::uint64_t n) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("mean_max_exponential: sigma must be > 0");
    }
    if (n == 0) throw std::domain_error("mean_max_exponential: n must be >= 1");
    double h = 0.0;
    if (n <= 1000000) {
        // smallest terms first
        for (std::uint64_t k = n; k >= 1; --k) h += 1.0 / static_cast<double>(k);
    } else {
        constexpr double euler_gamma = 0.5772156649015328606;
        const double nd = static_cast<double>(n);
        h = std::log(nd) + euler_gamma + 1.0 / (2.0 * nd) - 1.0 / (12.0 * nd * nd);
    }
    return sigma * h;
}

} // namespace lifetail
