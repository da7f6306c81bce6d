#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "lifetail/evd.hpp"
#include "lifetail/rng.hpp"
#include "lifetail/stats.hpp"

using namespace lifetail;

namespace {
constexpr double kLn2 = 0.6931471805599453;

// Simpson quadrature on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
    const double h = (b - a) / (2.0 * panels);
    double s = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
    return s * h / 3.0;
}
} // namespace

TEST_CASE("gp_cdf matches closed-form anchor points") {
    CHECK(gp_cdf({0.0, 1.0}, kLn2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gp_cdf({-0.5, 1.0}, 2.0) == doctest::Approx(1.0).epsilon(1e-12)); // upper endpoint
    CHECK(gp_cdf({1.0, 1.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-12)); // 1 - (1+1)^{-1}
    CHECK(gp_cdf({0.3, 2.0}, 0.0) == 0.0);
    CHECK_THROWS_AS(gp_cdf({0.0, 1.0}, -1.0), std::domain_error);
    CHECK_THROWS_AS(gp_cdf({0.0, -1.0}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(gp_cdf({0.0, 1.0}, std::nan("")), std::domain_error);
}

TEST_CASE("gp_pdf anchor points and out-of-support zeros") {
    CHECK(gp_pdf({0.0, 2.0}, 0.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gp_pdf({0.0, 1.0}, 1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(gp_pdf({-0.5, 1.0}, 2.5) == 0.0);
    CHECK(gp_pdf({0.0, 1.0}, -0.5) == 0.0);
}

TEST_CASE("gp_pdf integrates to one over the support") {
    for (const GpParams p : {GpParams{0.0, 1.34}, GpParams{-0.5, 1.0}, GpParams{0.4, 2.0}}) {
        const double hi = p.gamma < 0.0 ? p.upper_endpoint() : 40.0 * p.sigma;
        const double mass = simpson([&](double x) { return gp_pdf(p, x); }, 0.0, hi, 20000);
        // gamma > 0 leaves a heavy tail beyond the clip; account for it
        const double tail = p.gamma < 0.0 ? 0.0 : gp_survival(p, hi);
        CHECK(mass + tail == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("gp_hazard regimes") {
    // constant hazard 1/sigma for the exponential sub-model
    for (double x : {0.0, 0.7, 3.0, 12.0}) {
        CHECK(gp_hazard({0.0, 1.34}, x) == doctest::Approx(1.0 / 1.34).epsilon(1e-12));
    }
    CHECK(gp_hazard({0.0, 1.34}, 1.0) == doctest::Approx(0.7463).epsilon(1e-4));
    // diverges approaching a finite endpoint
    CHECK(gp_hazard({-0.5, 1.0}, 2.0 - 1e-9) > 1e8);
    CHECK_THROWS_AS(gp_hazard({-0.5, 1.0}, 2.0), std::domain_error);
    CHECK_THROWS_AS(gp_hazard({-0.5, 1.0}, 2.5), std::domain_error);
    // decreasing for gamma > 0
    CHECK(gp_hazard({1.0, 1.0}, 1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(gp_hazard({1.0, 1.0}, 3.0) < gp_hazard({1.0, 1.0}, 1.0));
}

TEST_CASE("gp_quantile inverts the cdf") {
    CHECK(gp_quantile({0.0, 1.0}, 0.5) == doctest::Approx(kLn2).epsilon(1e-14));
    CHECK(gp_quantile({0.0, 1.34}, 0.0) == 0.0);
    CHECK(gp_quantile({-0.5, 1.0}, 1.0 - 1e-13) == doctest::Approx(2.0).epsilon(1e-5));
    CHECK_THROWS_AS(gp_quantile({0.0, 1.0}, 1.0), std::domain_error);
    CHECK_THROWS_AS(gp_quantile({0.0, 1.0}, -0.1), std::domain_error);

    for (const GpParams p : {GpParams{0.0, 1.34}, GpParams{-0.3, 0.7}, GpParams{0.8, 2.5}}) {
        for (int i = 1; i <= 99; ++i) {
            const double q = i / 100.0;
            CHECK(gp_cdf(p, gp_quantile(p, q)) == doctest::Approx(q).epsilon(1e-12));
        }
    }
}

TEST_CASE("continuity across the gamma=0 band") {
    const double sigma = 1.34;
    for (double gamma : {1e-8, -1e-8, 5e-9, -5e-9, 9.9e-9}) {
        for (int i = 0; i <= 100; ++i) {
            const double x = 0.2 * sigma * i; // grid over [0, 20 sigma]
            const double expo = -std::expm1(-x / sigma);
            CHECK(std::abs(gp_cdf({gamma, sigma}, x) - expo) < 1e-9);
        }
    }
    // just outside the band the stable GP evaluation stays glued to the limit
    for (double gamma : {2e-8, -2e-8, 1e-7, -1e-7}) {
        for (int i = 0; i <= 100; ++i) {
            const double x = 0.2 * sigma * i;
            const double expo = -std::expm1(-x / sigma);
            CHECK(std::abs(gp_cdf({gamma, sigma}, x) - expo) < 1e-6);
        }
    }
}

TEST_CASE("pdf equals the numerical derivative of the cdf") {
    for (const GpParams p : {GpParams{0.0, 1.34}, GpParams{-0.4, 1.2}, GpParams{0.6, 0.9}}) {
        const double h = 1e-5 * p.sigma;
        const double hi = std::min(p.upper_endpoint(), 25.0 * p.sigma);
        for (int i = 1; i < 40; ++i) {
            const double x = hi * i / 40.0;
            if (x - h <= 0.0 || x + h >= p.upper_endpoint()) continue;
            const double deriv = (gp_cdf(p, x + h) - gp_cdf(p, x - h)) / (2.0 * h);
            CHECK(gp_pdf(p, x) == doctest::Approx(deriv).epsilon(1e-6));
        }
    }
}

TEST_CASE("hazard times survival equals the density") {
    for (const GpParams p : {GpParams{0.0, 1.34}, GpParams{-0.4, 1.2}, GpParams{0.6, 0.9}}) {
        const double hi = std::min(p.upper_endpoint(), 25.0 * p.sigma);
        for (int i = 1; i < 50; ++i) {
            const double x = hi * i / 50.0 * 0.98;
            const double lhs = gp_hazard(p, x) * gp_survival(p, x);
            CHECK(lhs == doctest::Approx(gp_pdf(p, x)).epsilon(1e-10));
        }
    }
}

TEST_CASE("gp_sample is reproducible and follows the law") {
    CHECK(gp_sample({0.0, 1.0}, 0, 7).empty());

    const GpParams p{0.0, 1.34};
    const auto a = gp_sample(p, 1000, 123);
    const auto b = gp_sample(p, 1000, 123);
    CHECK(a == b); // bit-identical for equal seeds

    const auto big = gp_sample(p, 100000, 99);
    const double mean = std::accumulate(big.begin(), big.end(), 0.0) / big.size();
    CHECK(std::abs(mean - 1.34) < 3.0 * 1.34 / std::sqrt(100000.0));

    const auto bounded = gp_sample({-0.5, 1.0}, 10000, 5);
    CHECK(std::all_of(bounded.begin(), bounded.end(), [](double x) { return x <= 2.0; }));

    // KS distance against the generating cdf
    std::vector<double> u(big.begin(), big.end());
    std::sort(u.begin(), u.end());
    for (auto& x : u) x = gp_cdf(p, x);
    CHECK(ks_distance(u) < 1.63 / std::sqrt(100000.0)); // ~1% critical value
}

TEST_CASE("mean of the maximum of n exponentials") {
    CHECK_THROWS_AS(mean_max_exponential(1.0, 0), std::domain_error);
    CHECK(mean_max_exponential(1.0, 1) == 1.0);
    CHECK(mean_max_exponential(1.0, 2) == 1.5); // H_2 = 3/2 exactly

    // Monte Carlo oracle for n = 2
    Rng rng(2024);
    const std::size_t reps = 1000000;
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < reps; ++i) {
        const double m = std::max(rng.exponential(), rng.exponential());
        sum += m;
        sumsq += m * m;
    }
    const double mc_mean = sum / reps;
    const double mc_se = std::sqrt((sumsq / reps - mc_mean * mc_mean) / reps);
    CHECK(std::abs(mean_max_exponential(1.0, 2) - mc_mean) < 3.0 * mc_se);

    // harmonic-sum evaluation, sigma = 1.35, n = 42
    CHECK(mean_max_exponential(1.35, 42) == doctest::Approx(5.841102788975258).epsilon(1e-12));

    // asymptotic branch agrees with the exact sum at the switch point
    const double exact = mean_max_exponential(1.0, 1000000);
    constexpr double euler = 0.5772156649015328606;
    const double asym = std::log(1e6) + euler + 0.5e-6 - 1.0 / 12e12;
    CHECK(exact == doctest::Approx(asym).epsilon(1e-12));
}
