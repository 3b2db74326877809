#pragma once

// Scalar model quantities for a range-bound market: the separation level
// lambda = r/sigma, the price potential V(S) = 1/S^2, the effective
// second-derivative coefficient sigma^4 / (r (sigma^2 + r)), and the
// turning point S* = sqrt(sigma/r) where V(S*) = lambda.

#include <cmath>
#include <stdexcept>

namespace qtunnel {

/// Annualized market parameters. Both rate and vol are strictly positive
/// fractions (0.05 means 5% per year); every downstream formula divides
/// by one of them, so non-positive values are rejected at construction.
class MarketParams {
public:
    MarketParams(double rate, double vol) : rate_(rate), vol_(vol) {
        if (!(std::isfinite(rate) && rate > 0.0))
            throw std::invalid_argument("MarketParams: rate must be finite and > 0");
        if (!(std::isfinite(vol) && vol > 0.0))
            throw std::invalid_argument("MarketParams: vol must be finite and > 0");
    }

    double rate() const { return rate_; }
    double vol() const { return vol_; }

private:
    double rate_;
    double vol_;
};

/// Separation level lambda = r / sigma.
inline double lambda_constant(const MarketParams& params) {
    return params.rate() / params.vol();
}

/// Price potential V(S) = 1/S^2, singular at the origin.
inline double potential(double s) {
    if (!(s > 0.0)) throw std::domain_error("potential: price must be > 0");
    return 1.0 / (s * s);
}

/// Coefficient of the second derivative in the pricing operator,
/// sigma^4 / (r (sigma^2 + r)). Plays the role of an effective hbar^2.
inline double planck_coefficient(const MarketParams& params) {
    const double s2 = params.vol() * params.vol();
    return s2 * s2 / (params.rate() * (s2 + params.rate()));
}

/// Turning point S* = sqrt(sigma/r), the unique S > 0 with V(S) = lambda.
inline double turning_point(const MarketParams& params) {
    return std::sqrt(params.vol() / params.rate());
}

/// Barrier geometry for a strike level K: a barrier exists only when the
/// strike sits below the turning point, i.e. (r/sigma) K^2 < 1.
struct BarrierGeometry {
    double strike;
    double turning_point;
    bool barrier_exists;
};

inline BarrierGeometry make_barrier_geometry(const MarketParams& params, double strike) {
    if (!(std::isfinite(strike) && strike > 0.0))
        throw std::invalid_argument("BarrierGeometry: strike must be finite and > 0");
    const double sp = turning_point(params);
    return BarrierGeometry{strike, sp, strike < sp};
}

}  // namespace qtunnel
