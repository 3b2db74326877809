#pragma once

// Seeded generator of range-bound price paths with an optional injected
// breakout (volatility collapse plus directional drift). The injection
// schedule doubles as the ground truth for detector tests.
//
// Randomness is pinned for reproducibility: std::mt19937_64 seeded from
// the config, uniforms taken as (x >> 11) * 2^-53 from the raw 64-bit
// draws, normals via the Box-Muller transform (two uniforms per normal).
//
// Path dynamics: C_{t+1} = C_t * exp(v_t * eps_t - v_t^2/2 + drift_t),
// reflected geometrically off the walls (C -> wall^2 / C) while range
// bound; from the breakout bar onward the volatility is damped, the
// drift kicks in, and reflection at the exit wall is disabled.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "qtunnel/dates.hpp"
#include "qtunnel/direction.hpp"
#include "qtunnel/marketdata.hpp"

namespace qtunnel {

struct BreakoutSpec {
    std::size_t at_bar = 0;
    double vol_damp = 0.25;        // in (0, 1)
    double drift_per_bar = 0.0;    // signed log return added each bar
    Direction direction = Direction::up;
};

struct SynthConfig {
    std::uint64_t seed = 0;
    std::size_t bars = 250;
    double start = 100.0;
    double support = 95.0;
    double resistance = 105.0;
    double daily_vol = 0.01;       // per-bar return volatility
    std::optional<BreakoutSpec> breakout;

    void validate() const {
        if (bars < 2) throw std::invalid_argument("SynthConfig: need at least 2 bars");
        if (!(support > 0.0 && support < start && start < resistance))
            throw std::invalid_argument("SynthConfig: need 0 < support < start < resistance");
        if (!(daily_vol > 0.0)) throw std::invalid_argument("SynthConfig: daily_vol must be > 0");
        if (breakout && !(breakout->vol_damp > 0.0 && breakout->vol_damp < 1.0))
            throw std::invalid_argument("SynthConfig: vol_damp must be in (0, 1)");
    }
};

namespace detail {

class SeededNormal {
public:
    explicit SeededNormal(std::uint64_t seed) : engine_(seed) {}

    double operator()() {
        const double u1 = ((engine_() >> 11) + 1.0) * 0x1.0p-53;   // (0, 1]
        const double u2 = (engine_() >> 11) * 0x1.0p-53;           // [0, 1)
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace detail

inline PriceSeries generate(const SynthConfig& config) {
    config.validate();
    detail::SeededNormal normal(config.seed);

    PriceSeries series;
    series.symbol = "synthetic";
    series.bars.reserve(config.bars);

    const Date first_date{2020, 1, 1};
    double close = config.start;
    double prev_close = config.start;

    for (std::size_t t = 0; t < config.bars; ++t) {
        const bool post_breakout = config.breakout && t >= config.breakout->at_bar;
        const double vol =
            config.daily_vol * (post_breakout ? config.breakout->vol_damp : 1.0);

        if (t > 0) {
            const double drift = post_breakout ? config.breakout->drift_per_bar : 0.0;
            const double eps = normal();
            prev_close = close;
            close *= std::exp(vol * eps - 0.5 * vol * vol + drift);

            const bool reflect_up =
                !(post_breakout && config.breakout->direction == Direction::up);
            const bool reflect_down =
                !(post_breakout && config.breakout->direction == Direction::down);
            for (int guard = 0; guard < 64; ++guard) {
                if (close > config.resistance && reflect_up)
                    close = config.resistance * config.resistance / close;
                else if (close < config.support && reflect_down)
                    close = config.support * config.support / close;
                else
                    break;
            }
        }

        Bar bar;
        bar.date = add_days(first_date, static_cast<long>(t));
        bar.open = (t == 0) ? config.start : prev_close;
        bar.close = close;
        bar.high = std::max(bar.open, bar.close) * (1.0 + vol / 4.0);
        bar.low = std::min(bar.open, bar.close) * (1.0 - vol / 4.0);
        bar.volume = 1000;
        series.bars.push_back(bar);
    }
    return series;
}

}  // namespace qtunnel
