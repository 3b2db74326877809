#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "qtunnel/tunneling.hpp"

using namespace qtunnel;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("strike at the turning point transmits fully") {
    const MarketParams p(0.05, 0.2);   // S* = 2
    const auto res = transmission_closed_form(p, 2.0);
    CHECK(res.t_closed == 1.0);
    CHECK(res.exponent == 0.0);
    CHECK_FALSE(res.geometry.barrier_exists);

    const auto above = transmission_closed_form(p, 3.5);
    CHECK(above.t_closed == 1.0);
    CHECK_FALSE(above.geometry.barrier_exists);
}

TEST_CASE("closed form matches frozen oracle values") {
    // frozen from the quadrature oracle (and an independent quadrature
    // cross-check during development)
    const auto deep = transmission_closed_form(MarketParams(0.05, 0.2), 1.0);
    CHECK_THAT(deep.t_closed, WithinRel(0.22036421872011233, 1e-9));
    CHECK_THAT(deep.exponent, WithinRel(-1.512473561888014, 1e-9));
    CHECK(deep.geometry.barrier_exists);

    const auto near = transmission_closed_form(MarketParams(0.05, 0.18), 1.8);
    CHECK_THAT(near.t_closed, WithinRel(0.9565090351785152, 1e-9));   // (r/sigma) K^2 = 0.9
}

TEST_CASE("closed form rejects bad strikes") {
    const MarketParams p(0.05, 0.2);
    CHECK_THROWS_AS(transmission_closed_form(p, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(transmission_closed_form(p, -2.0), std::invalid_argument);
}

TEST_CASE("quadrature route agrees with the closed form") {
    const MarketParams p(0.05, 0.2);
    CHECK(wkb_integral_numeric(p, 2.0) == 1.0);   // empty forbidden region

    const double tq = wkb_integral_numeric(p, 1.0, 1e-8);
    const double tc = transmission_closed_form(p, 1.0).t_closed;
    CHECK_THAT(tq, WithinRel(tc, 1e-6));

    // any genuine barrier transmits strictly below 1
    CHECK(wkb_integral_numeric(p, 1.5) < 1.0);
    CHECK(wkb_integral_numeric(MarketParams(0.05, 0.18), 1.8) < 1.0);
}

TEST_CASE("quadrature tolerance contract") {
    const MarketParams p(0.05, 0.2);
    CHECK_THROWS_AS(wkb_integral_numeric(p, 1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(wkb_integral_numeric(p, 1.0, 1e-3), std::invalid_argument);
    CHECK_THROWS_AS(wkb_integral_numeric(p, 0.0), std::invalid_argument);
}

TEST_CASE("oracle equivalence across the parameter grid") {
    for (double r : {0.01, 0.02, 0.05, 0.1}) {
        for (double s : {0.1, 0.2, 0.4, 0.6}) {
            const MarketParams p(r, s);
            for (double q : {0.05, 0.1, 0.25, 0.5, 0.81, 0.9, 0.99}) {
                const double strike = std::sqrt(q * s / r);
                const auto report = transmission_report(p, strike, 1e-8);
                INFO("r=" << r << " sigma=" << s << " (r/sigma)K^2=" << q);
                CHECK(report.rel_gap <= 1e-6);
                CHECK(report.t_closed > 0.0);
                CHECK(report.t_closed <= 1.0);
                CHECK(report.t_quadrature > 0.0);
                CHECK(report.t_quadrature <= 1.0);
                CHECK(report.exponent <= 0.0);
            }
        }
    }
}

TEST_CASE("transmission is continuous at the barrier boundary") {
    const MarketParams p(0.05, 0.2);
    const double strike = std::sqrt((1.0 - 1e-6) * p.vol() / p.rate());
    const double t = transmission_closed_form(p, strike).t_closed;
    CHECK(t > 0.9999);
    CHECK(t < 1.0);
}

TEST_CASE("transmission increases with the strike level") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rate_dist(0.005, 0.15);
    std::uniform_real_distribution<double> vol_dist(0.05, 0.8);
    for (int trial = 0; trial < 3; ++trial) {
        const MarketParams p(rate_dist(rng), vol_dist(rng));
        const double s_star = turning_point(p);
        double prev_t = -1.0, prev_e = -std::numeric_limits<double>::infinity();
        for (int i = 1; i <= 50; ++i) {
            const double k = s_star * static_cast<double>(i) / 51.0;
            const auto res = transmission_closed_form(p, k);
            CHECK(res.exponent > prev_e);
            CHECK(res.t_closed > prev_t);
            prev_t = res.t_closed;
            prev_e = res.exponent;
        }
    }
}

TEST_CASE("near the threshold, falling sigma raises T") {
    // regime-restricted claim: fixed r and K with (r/sigma) K^2 kept in
    // (0.54, 1); global monotonicity in sigma does not hold
    const double r = 0.05, strike = 1.8;
    double prev = -1.0;
    bool crossed_095 = false;
    for (double s = 0.30; s >= 0.1625 - 1e-12; s -= 0.0025) {
        const double t = transmission_closed_form(MarketParams(r, s), strike).t_closed;
        CHECK(t > prev);
        prev = t;
        if (t > 0.95) crossed_095 = true;
    }
    CHECK(crossed_095);

    // spot value against the quadrature oracle
    const MarketParams spot(0.05, 0.18);
    const double tc = transmission_closed_form(spot, strike).t_closed;
    const double tq = wkb_integral_numeric(spot, strike, 1e-8);
    CHECK_THAT(tc, WithinAbs(tq, 1e-3));
    CHECK_THAT(tc, WithinAbs(0.956, 1e-3));

    // counterexample guard: the claim is false away from the threshold
    const double t_low = transmission_closed_form(MarketParams(0.05, 0.1), 1.0).t_closed;
    const double t_high = transmission_closed_form(MarketParams(0.05, 0.2), 1.0).t_closed;
    CHECK(t_low < t_high);
}

TEST_CASE("barrier profile samples and annotations") {
    const auto profile = barrier_profile(1.0, 2.0, 2, {});
    REQUIRE(profile.samples.size() == 2);
    CHECK(profile.samples[0].first == 1.0);
    CHECK_THAT(profile.samples[0].second, WithinRel(1.0, 1e-15));
    CHECK(profile.samples[1].first == 2.0);
    CHECK_THAT(profile.samples[1].second, WithinRel(0.25, 1e-15));

    const auto annotated = barrier_profile(1.0, 3.0, 11, {0.25});
    REQUIRE(annotated.annotations.size() == 1);
    CHECK(annotated.annotations[0].level == 0.25);
    CHECK_THAT(annotated.annotations[0].turning_point, WithinRel(2.0, 1e-14));

    // levels whose turning point lies outside the range are dropped
    const auto outside = barrier_profile(1.0, 1.5, 5, {0.25, 2.0});
    REQUIRE(outside.annotations.size() == 0);

    // V strictly decreasing in S on the positive axis
    const auto many = barrier_profile(0.5, 4.0, 101, {});
    for (std::size_t i = 1; i < many.samples.size(); ++i) {
        CHECK(many.samples[i].first > many.samples[i - 1].first);
        CHECK(many.samples[i].second < many.samples[i - 1].second);
    }

    CHECK_THROWS_AS(barrier_profile(0.0, 2.0, 5, {}), std::domain_error);
    CHECK_THROWS_AS(barrier_profile(-1.0, 2.0, 5, {}), std::domain_error);
    CHECK_THROWS_AS(barrier_profile(2.0, 1.0, 5, {}), std::invalid_argument);
    CHECK_THROWS_AS(barrier_profile(1.0, 2.0, 1, {}), std::invalid_argument);
    CHECK_THROWS_AS(barrier_profile(1.0, 2.0, 5, {-0.5}), std::invalid_argument);
}
