#pragma once

#include <charconv>
#include <cstdio>
#include <string>
#include <string_view>
#include <tuple>

#include "qtunnel/errors.hpp"

namespace qtunnel {

/// Calendar date. Arithmetic goes through the proleptic-Gregorian civil
/// day count (Howard Hinnant's algorithms).
struct Date {
    int year = 1970;
    int month = 1;
    int day = 1;

    friend bool operator==(const Date& a, const Date& b) {
        return a.year == b.year && a.month == b.month && a.day == b.day;
    }
    friend bool operator<(const Date& a, const Date& b) {
        return std::tie(a.year, a.month, a.day) < std::tie(b.year, b.month, b.day);
    }
};

namespace detail {

inline bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

inline int days_in_month(int y, int m) {
    static constexpr int lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return (m == 2 && is_leap(y)) ? 29 : lengths[m - 1];
}

inline long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097 + static_cast<long>(doe) - 719468;
}

inline Date civil_from_days(long z) {
    z += 719468;
    const long era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const long y = static_cast<long>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return Date{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d)};
}

}  // namespace detail

inline bool date_is_valid(const Date& d) {
    return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
           d.day <= detail::days_in_month(d.year, d.month);
}

inline Date add_days(const Date& d, long n) {
    return detail::civil_from_days(detail::days_from_civil(d.year, d.month, d.day) + n);
}

/// Strict ISO-8601 (YYYY-MM-DD) parse; throws ParseError otherwise.
inline Date parse_date(std::string_view text, std::size_t line = 0) {
    auto fail = [&]() -> Date {
        throw ParseError("expected ISO-8601 date (YYYY-MM-DD), got '" + std::string(text) + "'",
                         line);
    };
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return fail();
    Date d;
    auto parse_int = [&](std::size_t pos, std::size_t len, int& out) {
        auto res = std::from_chars(text.data() + pos, text.data() + pos + len, out);
        return res.ec == std::errc() && res.ptr == text.data() + pos + len;
    };
    if (!parse_int(0, 4, d.year) || !parse_int(5, 2, d.month) || !parse_int(8, 2, d.day))
        return fail();
    if (!date_is_valid(d)) return fail();
    return d;
}

inline std::string format_date(const Date& d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

}  // namespace qtunnel
