#pragma once

// Tunneling-breakout detector. Within (or immediately after) a detected
// range-bound regime, an event fires at the first bar where all of:
//   (a) the bar lies in the regime or its lookahead tail (one regime
//       window past end_index),
//   (b) the close sits outside [support, resistance] (sets direction),
//   (c) fast realized vol has collapsed: vol_fast <= ratio * vol_slow,
//   (d) the transmission coefficient at the breached wall clears the
//       threshold, with sigma taken as the slow-window vol at that bar.
// At most one event per regime per direction. Strike normalization: the
// wall level divided by the regime midpoint.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "qtunnel/direction.hpp"
#include "qtunnel/market_params.hpp"
#include "qtunnel/marketdata.hpp"
#include "qtunnel/regime.hpp"
#include "qtunnel/tunneling.hpp"

namespace qtunnel {

enum class Normalization { midpoint };

struct DetectorConfig {
    double rate = 0.05;              // annualized rate fed into MarketParams
    double t_threshold = 0.95;
    double vol_drop_ratio = 0.5;
    std::size_t vol_fast_window = 5;
    std::size_t vol_slow_window = 20;
    Normalization normalization = Normalization::midpoint;

    void validate() const {
        if (!(std::isfinite(rate) && rate > 0.0))
            throw std::invalid_argument("DetectorConfig: rate must be finite and > 0");
        if (!(t_threshold > 0.0 && t_threshold <= 1.0))
            throw std::invalid_argument("DetectorConfig: t_threshold must be in (0, 1]");
        if (!(vol_drop_ratio > 0.0 && vol_drop_ratio < 1.0))
            throw std::invalid_argument("DetectorConfig: vol_drop_ratio must be in (0, 1)");
        if (vol_fast_window < 2 || vol_slow_window < 2)
            throw std::invalid_argument("DetectorConfig: vol windows must be >= 2");
        if (vol_fast_window >= vol_slow_window)
            throw std::invalid_argument("DetectorConfig: vol_fast_window must be < vol_slow_window");
    }
};

struct TunnelEvent {
    std::size_t bar_index = 0;
    Direction direction = Direction::up;
    std::size_t regime_index = 0;   // position in ScanReport::regimes
    double t_at_event = 0.0;
    double vol_fast = 0.0;
    double vol_slow = 0.0;
    std::vector<std::pair<std::size_t, double>> t_trajectory;   // regime tail up to the event
};

struct DiagnosticsRow {
    Date date;
    double close = 0.0;
    std::optional<double> vol_fast;
    std::optional<double> vol_slow;
    std::optional<double> transmission;   // vs the nearer wall, when a regime applies
    bool in_regime = false;
};

struct ScanReport {
    std::string symbol;
    DetectorConfig config;
    RegimeParams regime_params;
    std::vector<RangeBound> regimes;
    std::vector<TunnelEvent> events;
    std::vector<DiagnosticsRow> diagnostics;
};

/// Transmission coefficient for a breached wall level, with the strike
/// normalized by the regime midpoint.
inline double evaluate_bar(const MarketParams& params, const RangeBound& regime, double close,
                           double direction_level) {
    if (!(close > 0.0)) throw std::invalid_argument("evaluate_bar: close must be > 0");
    const double midpoint = 0.5 * (regime.support + regime.resistance);
    return transmission_closed_form(params, direction_level / midpoint).t_closed;
}

namespace detail {

inline std::size_t trajectory_length() { return 20; }

}  // namespace detail

inline ScanReport scan(const PriceSeries& series, const DetectorConfig& config,
                       const RegimeParams& regime_params) {
    config.validate();
    const std::size_t n = series.bars.size();
    if (n < config.vol_slow_window + 1)
        throw std::out_of_range("scan: series of " + std::to_string(n) +
                                " bars is shorter than the slow vol window");

    ScanReport report;
    report.symbol = series.symbol;
    report.config = config;
    report.regime_params = regime_params;
    report.regimes = detect_range(series, regime_params);

    // rolling vols, where computable
    std::vector<std::optional<double>> fast(n), slow(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i >= config.vol_fast_window)
            fast[i] = realized_volatility(series, config.vol_fast_window, i).vol;
        if (i >= config.vol_slow_window)
            slow[i] = realized_volatility(series, config.vol_slow_window, i).vol;
    }

    for (std::size_t r = 0; r < report.regimes.size(); ++r) {
        const RangeBound& regime = report.regimes[r];
        bool fired_up = false, fired_down = false;
        const std::size_t last_eligible =
            std::min(n - 1, regime.end_index + regime_params.window);
        for (std::size_t i = regime.start_index; i <= last_eligible; ++i) {
            const double close = series.bars[i].close;
            Direction dir;
            double level;
            if (close > regime.resistance) {
                dir = Direction::up;
                level = regime.resistance;
            } else if (close < regime.support) {
                dir = Direction::down;
                level = regime.support;
            } else {
                continue;
            }
            if ((dir == Direction::up && fired_up) || (dir == Direction::down && fired_down))
                continue;
            if (!fast[i] || !slow[i] || !(*slow[i] > 0.0)) continue;
            if (!(*fast[i] <= config.vol_drop_ratio * *slow[i])) continue;

            const MarketParams params(config.rate, *slow[i]);
            const double t = evaluate_bar(params, regime, close, level);
            if (t < config.t_threshold) continue;

            TunnelEvent event;
            event.bar_index = i;
            event.direction = dir;
            event.regime_index = r;
            event.t_at_event = t;
            event.vol_fast = *fast[i];
            event.vol_slow = *slow[i];
            const std::size_t tail = detail::trajectory_length();
            const std::size_t from =
                std::max(regime.start_index, (i + 1 >= tail) ? i + 1 - tail : 0);
            for (std::size_t j = from; j <= i; ++j) {
                if (!slow[j] || !(*slow[j] > 0.0)) continue;
                const MarketParams pj(config.rate, *slow[j]);
                event.t_trajectory.emplace_back(j, evaluate_bar(pj, regime, close, level));
            }
            report.events.push_back(std::move(event));
            (dir == Direction::up ? fired_up : fired_down) = true;
        }
    }

    // per-bar diagnostics: vols, regime membership, transmission vs the
    // nearer wall of the applicable regime (inside it, or in its tail)
    report.diagnostics.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        DiagnosticsRow row;
        row.date = series.bars[i].date;
        row.close = series.bars[i].close;
        row.vol_fast = fast[i];
        row.vol_slow = slow[i];
        const RangeBound* applicable = nullptr;
        for (const RangeBound& regime : report.regimes) {
            if (i >= regime.start_index && i <= regime.end_index) {
                row.in_regime = true;
                applicable = &regime;
                break;
            }
            if (i > regime.end_index && i <= regime.end_index + regime_params.window)
                applicable = &regime;   // tail; keep scanning for a containing regime
        }
        if (applicable && slow[i] && *slow[i] > 0.0) {
            const double midpoint = 0.5 * (applicable->support + applicable->resistance);
            const double level =
                (row.close >= midpoint) ? applicable->resistance : applicable->support;
            const MarketParams params(config.rate, *slow[i]);
            row.transmission = evaluate_bar(params, *applicable, row.close, level);
        }
        report.diagnostics.push_back(std::move(row));
    }
    return report;
}

}  // namespace qtunnel
