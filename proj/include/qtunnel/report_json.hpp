#pragma once

// Canonical JSON form of a ScanReport: fixed key order (insertion order
// via ordered_json), ISO dates, doubles serialized shortest-round-trip.
// Byte-identical for identical reports.

#include <json.hpp>

#include "qtunnel/dates.hpp"
#include "qtunnel/detector.hpp"

namespace qtunnel {

inline nlohmann::ordered_json to_json(const RangeBound& regime) {
    return nlohmann::ordered_json{{"start_index", regime.start_index},
                                  {"end_index", regime.end_index},
                                  {"support", regime.support},
                                  {"resistance", regime.resistance},
                                  {"containment", regime.containment}};
}

inline nlohmann::ordered_json to_json(const TunnelEvent& event, const PriceSeries* series) {
    nlohmann::ordered_json j{{"bar_index", event.bar_index},
                             {"direction", to_string(event.direction)},
                             {"regime_index", event.regime_index},
                             {"t_at_event", event.t_at_event},
                             {"vol_fast", event.vol_fast},
                             {"vol_slow", event.vol_slow}};
    if (series) j["date"] = format_date(series->bars[event.bar_index].date);
    nlohmann::ordered_json trajectory = nlohmann::ordered_json::array();
    for (const auto& [index, t] : event.t_trajectory)
        trajectory.push_back(nlohmann::ordered_json::array({index, t}));
    j["t_trajectory"] = std::move(trajectory);
    return j;
}

inline nlohmann::ordered_json scan_report_to_json(const ScanReport& report,
                                                  const PriceSeries* series = nullptr) {
    nlohmann::ordered_json config{
        {"rate", report.config.rate},
        {"t_threshold", report.config.t_threshold},
        {"vol_drop_ratio", report.config.vol_drop_ratio},
        {"vol_fast_window", report.config.vol_fast_window},
        {"vol_slow_window", report.config.vol_slow_window},
        {"normalization", "midpoint"},
        {"regime",
         {{"window", report.regime_params.window},
          {"band_fraction", report.regime_params.band_fraction},
          {"containment_min", report.regime_params.containment_min},
          {"min_length", report.regime_params.min_length}}}};

    nlohmann::ordered_json regimes = nlohmann::ordered_json::array();
    for (const auto& regime : report.regimes) regimes.push_back(to_json(regime));

    nlohmann::ordered_json events = nlohmann::ordered_json::array();
    for (const auto& event : report.events) events.push_back(to_json(event, series));

    nlohmann::ordered_json diagnostics = nlohmann::ordered_json::array();
    for (const auto& row : report.diagnostics) {
        nlohmann::ordered_json r{{"date", format_date(row.date)}, {"close", row.close}};
        r["vol_fast"] = row.vol_fast ? nlohmann::ordered_json(*row.vol_fast)
                                     : nlohmann::ordered_json(nullptr);
        r["vol_slow"] = row.vol_slow ? nlohmann::ordered_json(*row.vol_slow)
                                     : nlohmann::ordered_json(nullptr);
        r["t"] = row.transmission ? nlohmann::ordered_json(*row.transmission)
                                  : nlohmann::ordered_json(nullptr);
        r["in_regime"] = row.in_regime;
        diagnostics.push_back(std::move(r));
    }

    return nlohmann::ordered_json{{"symbol", report.symbol},
                                  {"config", std::move(config)},
                                  {"regimes", std::move(regimes)},
                                  {"events", std::move(events)},
                                  {"diagnostics", std::move(diagnostics)}};
}

}  // namespace qtunnel
