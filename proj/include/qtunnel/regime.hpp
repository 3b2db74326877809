#pragma once

// Range-bound regime detection. A rolling window qualifies when its
// percentile walls (5th of lows / 95th of highs, nearest-rank) are narrow
// relative to their midpoint and contain most closes; consecutive
// qualifying windows merge into one regime carrying the walls of its
// final window. If the merged span fails re-validation against those
// walls (the final windows may already straddle a breakout), the regime
// is trimmed from the right to the latest window whose walls hold over
// the span.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "qtunnel/marketdata.hpp"

namespace qtunnel {

struct RegimeParams {
    std::size_t window = 60;
    double band_fraction = 0.10;
    double containment_min = 0.8;
    std::size_t min_length = 40;

    void validate() const {
        if (window < 2) throw std::invalid_argument("RegimeParams: window must be >= 2");
        if (!(band_fraction > 0.0 && band_fraction < 1.0))
            throw std::invalid_argument("RegimeParams: band_fraction must be in (0, 1)");
        if (!(containment_min > 0.0 && containment_min <= 1.0))
            throw std::invalid_argument("RegimeParams: containment_min must be in (0, 1]");
        if (min_length < 1) throw std::invalid_argument("RegimeParams: min_length must be >= 1");
    }
};

struct RangeBound {
    std::size_t start_index = 0;
    std::size_t end_index = 0;
    double support = 0.0;
    double resistance = 0.0;
    double containment = 0.0;   // fraction of closes in [support, resistance] over the span
};

namespace detail {

/// Nearest-rank percentile: the value at rank ceil(p/100 * n), 1-indexed.
inline double nearest_rank_percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * n));
    rank = std::max<std::size_t>(1, std::min<std::size_t>(values.size(), rank));
    return values[rank - 1];
}

inline double containment_fraction(const std::vector<Bar>& bars, std::size_t first,
                                   std::size_t last, double support, double resistance) {
    std::size_t inside = 0;
    for (std::size_t i = first; i <= last; ++i)
        if (bars[i].close >= support && bars[i].close <= resistance) ++inside;
    return static_cast<double>(inside) / static_cast<double>(last - first + 1);
}

}  // namespace detail

inline std::vector<RangeBound> detect_range(const PriceSeries& series,
                                            const RegimeParams& params) {
    params.validate();
    const auto& bars = series.bars;
    const std::size_t n = bars.size();
    if (n < std::max(params.window, params.min_length))
        throw std::out_of_range("detect_range: series of " + std::to_string(n) +
                                " bars is shorter than window/min_length");

    struct WindowFacts {
        bool qualifies;
        double support;
        double resistance;
    };
    std::vector<WindowFacts> windows;   // one per window end in [window-1, n-1]
    windows.reserve(n - params.window + 1);
    std::vector<double> lows(params.window), highs(params.window);
    for (std::size_t end = params.window - 1; end < n; ++end) {
        const std::size_t first = end - params.window + 1;
        for (std::size_t i = 0; i < params.window; ++i) {
            lows[i] = bars[first + i].low;
            highs[i] = bars[first + i].high;
        }
        double support = detail::nearest_rank_percentile(lows, 5.0);
        double resistance = detail::nearest_rank_percentile(highs, 95.0);
        const double mid = 0.5 * (support + resistance);
        const double band = (resistance - support) / mid;
        const double contained =
            detail::containment_fraction(bars, first, end, support, resistance);
        windows.push_back({band <= params.band_fraction && contained >= params.containment_min,
                           support, resistance});
    }

    auto widen_if_flat = [](double& support, double& resistance) {
        if (support == resistance) {
            const double eps = 1e-6 * support;
            support -= eps;
            resistance += eps;
        }
    };

    std::vector<RangeBound> regimes;
    const std::size_t base = params.window - 1;   // bar index of windows[0]'s end
    std::size_t w = 0;
    while (w < windows.size()) {
        if (!windows[w].qualifies) {
            ++w;
            continue;
        }
        std::size_t run_end = w;
        while (run_end + 1 < windows.size() && windows[run_end + 1].qualifies) ++run_end;

        std::size_t start = (base + w) - params.window + 1;
        if (!regimes.empty() && start <= regimes.back().end_index)
            start = regimes.back().end_index + 1;   // keep regimes disjoint

        for (std::size_t cand = run_end + 1; cand-- > w;) {
            const std::size_t end = base + cand;
            if (start > end) break;
            double support = windows[cand].support;
            double resistance = windows[cand].resistance;
            widen_if_flat(support, resistance);
            const double contained =
                detail::containment_fraction(bars, start, end, support, resistance);
            if (contained >= params.containment_min) {
                if (end - start + 1 >= params.min_length)
                    regimes.push_back({start, end, support, resistance, contained});
                break;
            }
        }
        w = run_end + 1;
    }
    return regimes;
}

}  // namespace qtunnel
