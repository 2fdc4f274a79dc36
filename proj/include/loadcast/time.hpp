#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "loadcast/errors.hpp"

namespace loadcast {

// Whole hours since 1970-01-01 00:00. All series indexing is done in this
// unit; minutes never appear past the parser.
using HourStamp = std::int64_t;

struct CivilTime {
    int year;
    int month;  // 1..12
    int day;    // 1..31
    int hour;   // 0..23
};

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    return (a % b != 0 && ((a % b < 0) != (b < 0))) ? q - 1 : q;
}

// Calendar conversions, Hinnant style (proleptic Gregorian, days since epoch).
constexpr std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = static_cast<unsigned>((153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1);
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

constexpr CivilTime civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned d = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp < 10 ? mp + 3 : mp - 9;
    return {static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(d), 0};
}

constexpr HourStamp make_hour(int year, int month, int day, int hour) {
    return days_from_civil(year, month, day) * 24 + hour;
}

constexpr CivilTime civil_of(HourStamp h) {
    const std::int64_t day = floor_div(h, 24);
    CivilTime c = civil_from_days(day);
    c.hour = static_cast<int>(h - day * 24);
    return c;
}

constexpr int hour_of_day(HourStamp h) { return static_cast<int>(h - floor_div(h, 24) * 24); }

// Monday = 0 ... Sunday = 6. The epoch day (1970-01-01) was a Thursday.
constexpr int day_of_week(HourStamp h) {
    const std::int64_t day = floor_div(h, 24);
    return static_cast<int>(((day + 3) % 7 + 7) % 7);
}

constexpr int month_of(HourStamp h) { return civil_of(h).month; }
constexpr int year_of(HourStamp h) { return civil_of(h).year; }

struct ParsedTime {
    HourStamp hour;      // UTC when had_offset, otherwise frame-less
    bool had_offset;
};

namespace detail {

inline int read_digits(std::string_view s, std::size_t& pos, int count, const std::string& what) {
    if (pos + count > s.size()) throw DataError("timestamp too short while reading " + what + ": '" + std::string(s) + "'");
    int v = 0;
    for (int i = 0; i < count; ++i) {
        char c = s[pos + i];
        if (c < '0' || c > '9') throw DataError("bad " + what + " in timestamp '" + std::string(s) + "'");
        v = v * 10 + (c - '0');
    }
    pos += count;
    return v;
}

inline void expect(std::string_view s, std::size_t& pos, char c) {
    if (pos >= s.size() || s[pos] != c)
        throw DataError(std::string("expected '") + c + "' in timestamp '" + std::string(s) + "'");
    ++pos;
}

}  // namespace detail

// Accepts "YYYY-MM-DD HH:MM", "YYYY-MM-DDTHH:MM", optional ":SS", optional
// trailing "Z" or "+HH:MM"/"-HH:MM". The instant must land on a whole hour
// (after applying any offset), otherwise the row is rejected.
inline ParsedTime parse_timestamp(std::string_view s) {
    std::size_t pos = 0;
    int year = detail::read_digits(s, pos, 4, "year");
    detail::expect(s, pos, '-');
    int month = detail::read_digits(s, pos, 2, "month");
    detail::expect(s, pos, '-');
    int day = detail::read_digits(s, pos, 2, "day");
    if (pos >= s.size() || (s[pos] != 'T' && s[pos] != ' '))
        throw DataError("expected date/time separator in timestamp '" + std::string(s) + "'");
    ++pos;
    int hour = detail::read_digits(s, pos, 2, "hour");
    detail::expect(s, pos, ':');
    int minute = detail::read_digits(s, pos, 2, "minute");
    int second = 0;
    if (pos < s.size() && s[pos] == ':') {
        ++pos;
        second = detail::read_digits(s, pos, 2, "second");
    }
    bool had_offset = false;
    int offset_min = 0;
    if (pos < s.size()) {
        char c = s[pos];
        if (c == 'Z') {
            ++pos;
            had_offset = true;
        } else if (c == '+' || c == '-') {
            ++pos;
            int oh = detail::read_digits(s, pos, 2, "offset hour");
            detail::expect(s, pos, ':');
            int om = detail::read_digits(s, pos, 2, "offset minute");
            offset_min = oh * 60 + om;
            if (c == '-') offset_min = -offset_min;
            had_offset = true;
        }
    }
    if (pos != s.size()) throw DataError("trailing characters in timestamp '" + std::string(s) + "'");
    if (month < 1 || month > 12) throw DataError("month out of range in timestamp '" + std::string(s) + "'");
    if (day < 1 || day > 31) throw DataError("day out of range in timestamp '" + std::string(s) + "'");
    if (hour > 23) throw DataError("hour out of range in timestamp '" + std::string(s) + "'");
    if (minute > 59 || second > 59) throw DataError("minute/second out of range in timestamp '" + std::string(s) + "'");
    if (second != 0) throw DataError("timestamp not hour aligned: '" + std::string(s) + "'");
    std::int64_t total_min = (days_from_civil(year, month, day) * 24 + hour) * 60 + minute - offset_min;
    if (total_min % 60 != 0) throw DataError("timestamp not hour aligned: '" + std::string(s) + "'");
    return {total_min / 60, had_offset};
}

inline std::string format_hour(HourStamp h) {
    CivilTime c = civil_of(h);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:00", c.year, c.month, c.day, c.hour);
    return buf;
}

}  // namespace loadcast
