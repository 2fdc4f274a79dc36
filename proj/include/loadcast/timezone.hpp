#pragma once

#include <cstdint>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>

#include "loadcast/errors.hpp"
#include "loadcast/time.hpp"

namespace loadcast {

// Minimal timezone support: fixed offsets plus the current EU DST rule
// (clocks go forward at 01:00 UTC on the last Sunday of March and back at
// 01:00 UTC on the last Sunday of October, in every participating zone at
// the same instant). The rule is applied uniformly to all years.

inline HourStamp eu_transition(int year, int month) {
    std::int64_t last_day = days_from_civil(year, month + 1, 1) - 1;
    int dow = static_cast<int>(((last_day + 3) % 7 + 7) % 7);  // Monday=0
    std::int64_t sunday = last_day - (dow + 1) % 7;
    return sunday * 24 + 1;
}

class Timezone {
public:
    Timezone() : id_("UTC"), std_offset_min_(0), eu_dst_(false) {}

    static Timezone fixed(std::string id, int offset_minutes) {
        Timezone tz;
        tz.id_ = std::move(id);
        tz.std_offset_min_ = offset_minutes;
        tz.eu_dst_ = false;
        return tz;
    }

    static Timezone with_eu_dst(std::string id, int std_offset_minutes) {
        Timezone tz;
        tz.id_ = std::move(id);
        tz.std_offset_min_ = std_offset_minutes;
        tz.eu_dst_ = true;
        return tz;
    }

    int offset_minutes_at_utc(HourStamp utc) const {
        if (!eu_dst_) return std_offset_min_;
        int y = year_of(utc);
        if (utc >= eu_transition(y, 3) && utc < eu_transition(y, 10)) return std_offset_min_ + 60;
        return std_offset_min_;
    }

    bool has_dst() const { return eu_dst_; }
    int standard_offset_minutes() const { return std_offset_min_; }
    const std::string& id() const { return id_; }

private:
    std::string id_;
    int std_offset_min_;
    bool eu_dst_;
};

namespace detail {

struct ZoneEntry {
    const char* name;
    int std_offset_min;
    bool eu_dst;
};

// Standard offsets as of the 2020s; pre-unification history is ignored.
inline constexpr ZoneEntry kZoneTable[] = {
    {"Europe/London", 0, true},      {"Europe/Dublin", 0, true},
    {"Europe/Lisbon", 0, true},      {"Europe/Madrid", 60, true},
    {"Europe/Paris", 60, true},      {"Europe/Brussels", 60, true},
    {"Europe/Amsterdam", 60, true},  {"Europe/Luxembourg", 60, true},
    {"Europe/Berlin", 60, true},     {"Europe/Zurich", 60, true},
    {"Europe/Rome", 60, true},       {"Europe/Vienna", 60, true},
    {"Europe/Prague", 60, true},     {"Europe/Copenhagen", 60, true},
    {"Europe/Oslo", 60, true},       {"Europe/Stockholm", 60, true},
    {"Europe/Warsaw", 60, true},     {"Europe/Budapest", 60, true},
    {"Europe/Bratislava", 60, true}, {"Europe/Ljubljana", 60, true},
    {"Europe/Zagreb", 60, true},     {"Europe/Belgrade", 60, true},
    {"Europe/Sarajevo", 60, true},   {"Europe/Skopje", 60, true},
    {"Europe/Podgorica", 60, true},  {"Europe/Tirane", 60, true},
    {"Europe/Malta", 60, true},      {"Europe/Helsinki", 120, true},
    {"Europe/Tallinn", 120, true},   {"Europe/Riga", 120, true},
    {"Europe/Vilnius", 120, true},   {"Europe/Athens", 120, true},
    {"Europe/Bucharest", 120, true}, {"Europe/Sofia", 120, true},
    {"Europe/Kyiv", 120, true},      {"Europe/Kiev", 120, true},
    {"Europe/Chisinau", 120, true},  {"Europe/Nicosia", 120, true},
    {"Europe/Istanbul", 180, false}, {"Europe/Moscow", 180, false},
    {"Europe/Minsk", 180, false},
};

}  // namespace detail

// Resolves "UTC", "UTC+HH:MM"/"UTC-HH:MM", or a known European zone name.
inline Timezone timezone_from_id(std::string_view id) {
    if (id == "UTC") return Timezone::fixed("UTC", 0);
    if (id.size() == 9 && id.substr(0, 3) == "UTC" && (id[3] == '+' || id[3] == '-') && id[6] == ':') {
        auto digit = [&](std::size_t i) -> int {
            char c = id[i];
            if (c < '0' || c > '9') throw ConfigError("bad timezone id '" + std::string(id) + "'");
            return c - '0';
        };
        int hh = digit(4) * 10 + digit(5);
        int mm = digit(7) * 10 + digit(8);
        if (hh > 18 || mm > 59) throw ConfigError("timezone offset out of range: '" + std::string(id) + "'");
        int total = hh * 60 + mm;
        if (id[3] == '-') total = -total;
        return Timezone::fixed(std::string(id), total);
    }
    for (const auto& z : detail::kZoneTable) {
        if (id == z.name) {
            return z.eu_dst ? Timezone::with_eu_dst(z.name, z.std_offset_min)
                            : Timezone::fixed(z.name, z.std_offset_min);
        }
    }
    throw ConfigError("unknown timezone id '" + std::string(id) + "'");
}

}  // namespace loadcast
