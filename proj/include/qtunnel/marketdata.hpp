#pragma once

// OHLCV bar ingestion and rolling realized volatility.
//
// CSV contract: header exactly `date,open,high,low,close,volume`, ISO
// dates, decimal numbers, LF or CRLF, UTF-8. Rows are sorted by date on
// input; duplicate dates are rejected.
//
// Volatility estimator: sample standard deviation (mean-subtracted,
// denominator n-1) of close-to-close log returns, annualized by
// sqrt(252). Calendar gaps are ignored; returns are per bar.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "qtunnel/dates.hpp"
#include "qtunnel/errors.hpp"

namespace qtunnel {

inline constexpr double kTradingDaysPerYear = 252.0;
inline constexpr char kCsvHeader[] = "date,open,high,low,close,volume";

struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    long long volume = 0;

    friend bool operator==(const Bar& a, const Bar& b) {
        return a.date == b.date && a.open == b.open && a.high == b.high && a.low == b.low &&
               a.close == b.close && a.volume == b.volume;
    }
};

struct PriceSeries {
    std::string symbol;
    std::vector<Bar> bars;   // strictly ascending dates, non-empty
};

struct VolPoint {
    Date date;
    double vol = 0.0;   // annualized, per sqrt(year)
};

namespace detail {

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

inline double parse_double_field(std::string_view text, const char* column, std::size_t line) {
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(value))
        throw ParseError("non-numeric value '" + std::string(text) + "' in column " + column,
                         line);
    return value;
}

inline long long parse_volume_field(std::string_view text, std::size_t line) {
    long long value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc() || res.ptr != text.data() + text.size())
        throw ParseError("non-integer volume '" + std::string(text) + "'", line);
    if (value < 0) throw ParseError("negative volume", line);
    return value;
}

}  // namespace detail

/// Parses and validates a whole CSV document into a PriceSeries.
inline PriceSeries parse_csv(std::string_view text, std::string symbol = "") {
    // tolerate a UTF-8 BOM
    if (text.size() >= 3 && text.substr(0, 3) == "\xef\xbb\xbf") text.remove_prefix(3);

    PriceSeries series;
    series.symbol = std::move(symbol);

    std::size_t line_no = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        std::string_view line =
            text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line.empty()) {
            if (eol == std::string_view::npos) break;
            continue;
        }

        auto fields = detail::split_fields(line);
        if (!header_seen) {
            static constexpr const char* expected[6] = {"date", "open", "high",
                                                        "low",  "close", "volume"};
            for (std::size_t i = 0; i < 6; ++i) {
                if (i >= fields.size() || fields[i] != expected[i])
                    throw ParseError(std::string("bad header: expected column '") + expected[i] +
                                         "' at position " + std::to_string(i + 1),
                                     line_no);
            }
            if (fields.size() != 6)
                throw ParseError("bad header: expected exactly 6 columns", line_no);
            header_seen = true;
            continue;
        }

        if (fields.size() != 6)
            throw ParseError("expected 6 fields, got " + std::to_string(fields.size()), line_no);
        Bar bar;
        bar.date = parse_date(fields[0], line_no);
        bar.open = detail::parse_double_field(fields[1], "open", line_no);
        bar.high = detail::parse_double_field(fields[2], "high", line_no);
        bar.low = detail::parse_double_field(fields[3], "low", line_no);
        bar.close = detail::parse_double_field(fields[4], "close", line_no);
        bar.volume = detail::parse_volume_field(fields[5], line_no);
        if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0))
            throw ParseError("prices must be > 0", line_no);
        if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close))
            throw ParseError("bar violates low <= min(open, close) <= max(open, close) <= high",
                             line_no);
        series.bars.push_back(bar);
    }

    if (!header_seen) throw ParseError("empty input: missing header");
    if (series.bars.empty()) throw ParseError("no data rows");

    std::stable_sort(series.bars.begin(), series.bars.end(),
                     [](const Bar& a, const Bar& b) { return a.date < b.date; });
    for (std::size_t i = 1; i < series.bars.size(); ++i) {
        if (series.bars[i].date == series.bars[i - 1].date)
            throw ParseError("duplicate date " + format_date(series.bars[i].date));
    }
    return series;
}

/// Emits the bit-exact CSV form parse_csv accepts; numbers use the
/// shortest round-trip representation.
inline std::string emit_csv(const PriceSeries& series) {
    auto format_number = [](double v) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        return std::string(buf, res.ptr);
    };
    std::string out = kCsvHeader;
    out += '\n';
    for (const Bar& bar : series.bars) {
        out += format_date(bar.date);
        out += ',';
        out += format_number(bar.open);
        out += ',';
        out += format_number(bar.high);
        out += ',';
        out += format_number(bar.low);
        out += ',';
        out += format_number(bar.close);
        out += ',';
        out += std::to_string(bar.volume);
        out += '\n';
    }
    return out;
}

/// Annualized close-to-close realized volatility of the `window` most
/// recent log returns ending at bars[end_index].
inline VolPoint realized_volatility(const PriceSeries& series, std::size_t window,
                                    std::size_t end_index) {
    if (window < 2) throw std::invalid_argument("realized_volatility: window must be >= 2");
    if (end_index >= series.bars.size())
        throw std::out_of_range("realized_volatility: end_index " + std::to_string(end_index) +
                                " out of range for " + std::to_string(series.bars.size()) +
                                " bars");
    if (end_index < window)
        throw std::out_of_range("realized_volatility: needs " + std::to_string(window + 1) +
                                " bars of history ending at index " + std::to_string(end_index) +
                                ", have " + std::to_string(end_index + 1));

    double mean = 0.0;
    std::vector<double> returns(window);
    for (std::size_t i = 0; i < window; ++i) {
        const std::size_t at = end_index - window + 1 + i;
        returns[i] = std::log(series.bars[at].close / series.bars[at - 1].close);
        mean += returns[i];
    }
    mean /= static_cast<double>(window);
    double ss = 0.0;
    for (double r : returns) ss += (r - mean) * (r - mean);
    const double sd = std::sqrt(ss / static_cast<double>(window - 1));
    return VolPoint{series.bars[end_index].date, sd * std::sqrt(kTradingDaysPerYear)};
}

/// One VolPoint per bar from index `window` onward.
inline std::vector<VolPoint> vol_series(const PriceSeries& series, std::size_t window) {
    if (window < 2) throw std::invalid_argument("vol_series: window must be >= 2");
    if (series.bars.size() < window + 1)
        throw std::out_of_range("vol_series: needs at least " + std::to_string(window + 1) +
                                " bars, have " + std::to_string(series.bars.size()));
    std::vector<VolPoint> points;
    points.reserve(series.bars.size() - window);
    for (std::size_t end = window; end < series.bars.size(); ++end)
        points.push_back(realized_volatility(series, window, end));
    return points;
}

}  // namespace qtunnel
