#pragma once

// Transmission coefficient for a level K below the turning point,
// computed two independent ways:
//
//   closed form   T = exp(-2 sqrt(r (sigma^2 + r) / sigma^4)
//                          * [artanh(z) - z]),  z = sqrt(1 - (r/sigma) K^2),
//   quadrature    T = exp(-2 * integral_K^{S*} kappa(S) dS),
//                 kappa(S) = sqrt((V(S) - lambda) / h^2),
//
// the first being the exact antiderivative of the second. A variant of
// the closed form sometimes quoted with a log argument
// sqrt((r/sigma)K^2 + 1) / sqrt((r/sigma)K^2 - 1) is domain-inconsistent
// for (r/sigma)K^2 < 1 (the argument of the accompanying square root);
// the artanh form is what the barrier integral actually evaluates to, and
// the quadrature route here cross-checks it.
//
// Levels at or above the turning point transmit fully: T = 1, no barrier.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qtunnel/market_params.hpp"
#include "qtunnel/quadrature.hpp"

namespace qtunnel {

inline constexpr double kDefaultWkbTolerance = 1e-8;
inline constexpr std::size_t kWkbEvaluationBudget = 1'000'000;

/// Closed-form transmission: probability, its (non-positive) exponent and
/// the barrier geometry.
struct ClosedFormTransmission {
    double t_closed;
    double exponent;
    BarrierGeometry geometry;
};

/// Both routes side by side with their relative gap.
struct TransmissionReport {
    double t_closed;
    double t_quadrature;
    double exponent;
    BarrierGeometry geometry;
    double rel_gap;
};

inline ClosedFormTransmission transmission_closed_form(const MarketParams& params,
                                                       double strike) {
    BarrierGeometry geom = make_barrier_geometry(params, strike);
    const double q = lambda_constant(params) * strike * strike;
    if (q >= 1.0) return ClosedFormTransmission{1.0, 0.0, geom};

    const double z = std::sqrt(1.0 - q);
    const double s2 = params.vol() * params.vol();
    const double prefactor = std::sqrt(params.rate() * (s2 + params.rate())) / s2;
    const double exponent = -2.0 * prefactor * (std::atanh(z) - z);
    return ClosedFormTransmission{std::exp(exponent), exponent, geom};
}

/// Transmission via adaptive quadrature of the barrier integral over the
/// forbidden region [K, S*]. The integrand has a square-root zero at S*
/// and is never evaluated there (interior-node rule). Throws NumericError
/// if the tolerance cannot be met within the evaluation budget.
inline double wkb_integral_numeric(const MarketParams& params, double strike,
                                   double tolerance = kDefaultWkbTolerance) {
    if (!(std::isfinite(strike) && strike > 0.0))
        throw std::invalid_argument("wkb_integral_numeric: strike must be finite and > 0");
    if (!(tolerance > 0.0 && tolerance <= 1e-4))
        throw std::invalid_argument("wkb_integral_numeric: tolerance must be in (0, 1e-4]");

    const double s_star = turning_point(params);
    if (strike >= s_star) return 1.0;

    const double lambda = lambda_constant(params);
    const double inv_h2 = 1.0 / planck_coefficient(params);
    auto kappa = [lambda, inv_h2](double s) {
        const double gap = 1.0 / (s * s) - lambda;
        return gap > 0.0 ? std::sqrt(gap * inv_h2) : 0.0;
    };
    QuadratureResult integral =
        integrate_adaptive(kappa, strike, s_star, tolerance, kWkbEvaluationBudget);
    return std::exp(-2.0 * integral.value);
}

/// Runs both routes and packages them with the relative gap.
inline TransmissionReport transmission_report(const MarketParams& params, double strike,
                                              double tolerance = kDefaultWkbTolerance) {
    ClosedFormTransmission closed = transmission_closed_form(params, strike);
    const double tq = wkb_integral_numeric(params, strike, tolerance);
    return TransmissionReport{closed.t_closed, tq, closed.exponent, closed.geometry,
                              std::abs(closed.t_closed - tq) / closed.t_closed};
}

/// Plot-ready sampling of the potential with turning-point annotations,
/// one per requested level that lands inside [s_min, s_max].
struct BarrierProfile {
    struct LevelAnnotation {
        double level;
        double turning_point;   // sqrt(1/level)
    };
    std::vector<std::pair<double, double>> samples;   // (S, V(S))
    std::vector<LevelAnnotation> annotations;
};

inline BarrierProfile barrier_profile(double s_min, double s_max, std::size_t points,
                                      const std::vector<double>& lambda_levels) {
    if (!(s_min > 0.0)) throw std::domain_error("barrier_profile: s_min must be > 0");
    if (!(s_max > s_min)) throw std::invalid_argument("barrier_profile: need s_max > s_min");
    if (points < 2) throw std::invalid_argument("barrier_profile: need at least 2 points");

    BarrierProfile profile;
    profile.samples.reserve(points);
    const double step = (s_max - s_min) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        const double s = (i + 1 == points) ? s_max : s_min + static_cast<double>(i) * step;
        profile.samples.emplace_back(s, potential(s));
    }
    for (double level : lambda_levels) {
        if (!(level > 0.0))
            throw std::invalid_argument("barrier_profile: lambda levels must be > 0");
        const double sp = std::sqrt(1.0 / level);
        if (sp >= s_min && sp <= s_max)
            profile.annotations.push_back({level, sp});
    }
    return profile;
}

}  // namespace qtunnel
