#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "lifetail/rng.hpp"
#include "lifetail/trunclik.hpp"

using namespace lifetail;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const GpParams kExp1{0.0, 1.0};

TruncatedObservation make_obs(double t, double x, double b, double e) {
    return TruncatedObservation{t, x, SamplingWindow{b, e}};
}
} // namespace

TEST_CASE("untruncated window reduces to the plain log-density") {
    const auto obs = make_obs(0.0, 1.7, 0.0, kInf);
    CHECK(log_contribution(obs, kExp1) ==
          doctest::Approx(gp_log_pdf(kExp1, 1.7)).epsilon(1e-14));
}

TEST_CASE("crossed-before-window case, hand-evaluated") {
    // t = 0, b - t = 1, e - t = 3, x = 2: log[e^-2 / (e^-1 - e^-3)]
    const auto obs = make_obs(0.0, 2.0, 1.0, 3.0);
    CHECK(log_contribution(obs, kExp1) ==
          doctest::Approx(-0.8545865421311409).epsilon(1e-12));

    // Monte Carlo rejection oracle: density of an Exp(1) lifetime at 2,
    // conditional on landing in [1, 3).
    Rng rng(314159);
    const double h = 0.05;
    std::size_t kept = 0, in_bin = 0;
    for (int i = 0; i < 4000000; ++i) {
        const double x = rng.exponential();
        if (x < 1.0 || x >= 3.0) continue;
        ++kept;
        if (std::abs(x - 2.0) < h) ++in_bin;
    }
    const double p_hat = static_cast<double>(in_bin) / static_cast<double>(kept);
    const double density_hat = p_hat / (2.0 * h);
    const double se = std::sqrt(p_hat * (1.0 - p_hat) / static_cast<double>(kept)) / (2.0 * h);
    CHECK(std::abs(std::exp(log_contribution(obs, kExp1)) - density_hat) < 4.0 * se + 1e-4);
}

TEST_CASE("crossed-inside-window case, hand-evaluated") {
    // t = 1 > b = 0, e - t = 2, x = 1: log[e^-1 / (1 - e^-2)]
    const auto obs = make_obs(1.0, 1.0, 0.0, 3.0);
    CHECK(log_contribution(obs, kExp1) ==
          doctest::Approx(-0.8545865421311409).epsilon(1e-12));

    // case unification: equals log f(x) - log F(e - t) exactly
    const double direct = gp_log_pdf(kExp1, 1.0) - std::log(gp_cdf(kExp1, 2.0));
    CHECK(log_contribution(obs, kExp1) == doctest::Approx(direct).epsilon(1e-14));
}

TEST_CASE("degenerate window and inclusion violations are distinct errors") {
    // window entirely beyond a finite support endpoint
    const auto beyond = make_obs(0.0, 3.5, 3.0, 5.0);
    CHECK_THROWS_AS(log_contribution(beyond, GpParams{-0.5, 1.0}), std::domain_error);

    // death outside the window
    const auto outside = make_obs(0.0, 0.5, 1.0, 3.0);
    CHECK_THROWS_AS(log_contribution(outside, kExp1), std::invalid_argument);

    // excess beyond the support endpoint but window feasible: -inf, not a throw
    const auto boundary = make_obs(0.0, 1.9, 0.5, 2.5);
    CHECK(log_contribution(boundary, GpParams{-0.6, 1.0}) == -kInf);
}

TEST_CASE("window widening drives the normalization to one") {
    double prev = -kInf;
    const double lf = gp_log_pdf(kExp1, 2.0);
    for (double e : {4.0, 6.0, 10.0, 20.0, 50.0}) {
        const auto obs = make_obs(0.0, 2.0, 0.0, e);
        const double lc = log_contribution(obs, kExp1);
        CHECK(lc <= lf + 1e-14);
        CHECK(lc >= prev); // monotone toward the untruncated value
        prev = lc;
    }
    CHECK(log_contribution(make_obs(0.0, 2.0, 0.0, kInf), kExp1) ==
          doctest::Approx(lf).epsilon(1e-14));
}

TEST_CASE("translation invariance") {
    const auto base = make_obs(0.0, 2.0, 1.0, 3.0);
    for (double shift : {1000.25, -512.5, 1986.0}) {
        const auto moved = make_obs(shift, 2.0, 1.0 + shift, 3.0 + shift);
        CHECK(log_contribution(moved, kExp1) ==
              doctest::Approx(log_contribution(base, kExp1)).epsilon(1e-12));
    }
}

TEST_CASE("total log-likelihood: additivity, exchangeability, -inf propagation") {
    std::vector<TruncatedObservation> sample;
    Rng rng(77);
    for (int i = 0; i < 200; ++i) {
        const double t = 1980.0 + 15.0 * rng.uniform01();
        // draw until inclusion to build a legal truncated sample
        while (true) {
            const double x = 1.3 * rng.exponential();
            if (1990.0 <= t + x && t + x < 1999.0) {
                sample.push_back(make_obs(t, x, 1990.0, 1999.0));
                break;
            }
        }
    }
    const GpParams p{0.1, 1.4};
    const double single = total_loglik(sample, p);

    SUBCASE("single observation equals its contribution") {
        const std::vector<TruncatedObservation> one{sample.front()};
        CHECK(total_loglik(one, p) ==
              doctest::Approx(log_contribution(sample.front(), p)).epsilon(1e-14));
    }

    SUBCASE("duplicated sample doubles the value") {
        auto doubled = sample;
        doubled.insert(doubled.end(), sample.begin(), sample.end());
        CHECK(total_loglik(doubled, p) == doctest::Approx(2.0 * single).epsilon(1e-13));
    }

    SUBCASE("permutation invariance within summation tolerance") {
        auto shuffled = sample;
        std::shuffle(shuffled.begin(), shuffled.end(), std::mt19937_64(5));
        CHECK(std::abs(total_loglik(shuffled, p) - single) < 1e-9);
    }

    SUBCASE("infeasible parameters give -inf, empty sample throws") {
        // gamma so negative that some excess exceeds the endpoint
        CHECK(total_loglik(sample, GpParams{-0.2, 0.3}) == -kInf);
        CHECK_THROWS_AS(total_loglik({}, p), std::invalid_argument);
    }
}

TEST_CASE("observation validation catches malformed inputs") {
    CHECK_THROWS_AS(make_obs(0.0, -0.5, 0.0, 2.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(make_obs(0.0, 1.0, 3.0, 2.0).validate(), std::invalid_argument);
    CHECK_NOTHROW(make_obs(0.0, 1.0, 0.5, 2.0).validate());
    CHECK(SamplingWindow{-kInf, kInf}.valid());
}
