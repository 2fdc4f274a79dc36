#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/time.hpp"

namespace loadcast {

// One country's hourly demand on a dense index: gaps are masked, never
// skipped, so sample i always sits at start + i hours.
struct LoadSeries {
    std::string country_code;
    std::string timezone_id = "UTC";
    HourStamp start = 0;
    bool local_time = false;  // false while stamps are UTC, true after localization
    std::vector<double> values;
    std::vector<std::uint8_t> missing;  // 1 = value absent

    std::size_t size() const { return values.size(); }
    HourStamp stamp_at(std::size_t i) const { return start + static_cast<HourStamp>(i); }
    bool is_missing(std::size_t i) const { return missing[i] != 0; }
};

inline void validate_series(const LoadSeries& s) {
    if (s.values.size() != s.missing.size())
        throw DataError("series " + s.country_code + ": values/missing length mismatch");
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (s.missing[i]) continue;
        if (!std::isfinite(s.values[i]) || s.values[i] < 0.0)
            throw DataError("series " + s.country_code + ": bad value at " + format_hour(s.stamp_at(i)));
    }
}

struct CountryMeta {
    std::string code;
    std::string display_name;
    std::string timezone_id = "UTC";
    std::optional<int> cluster_id;
};

struct SplitSpec {
    HourStamp train_end = 0;
    HourStamp val_end = 0;
    HourStamp test_end = 0;
};

inline void validate_splits(const SplitSpec& sp) {
    if (!(sp.train_end < sp.val_end && sp.val_end < sp.test_end))
        throw ConfigError("split boundaries must satisfy train_end < val_end < test_end");
}

struct Dataset {
    std::map<std::string, LoadSeries> series;
    std::map<std::string, CountryMeta> meta;
    SplitSpec splits;
};

struct SplitResult {
    LoadSeries train;
    LoadSeries val;
    LoadSeries test;
};

// Cuts [start, test_end) into three contiguous partitions at the boundary
// stamps. A series may begin after the nominal dataset start, which just
// shortens the train partition; it must still reach test_end.
inline SplitResult split_series(const LoadSeries& s, const SplitSpec& sp) {
    validate_splits(sp);
    const auto n = static_cast<HourStamp>(s.size());
    if (sp.train_end <= s.start)
        throw DataError("series " + s.country_code + ": train partition empty (series starts at " +
                        format_hour(s.start) + ")");
    if (sp.test_end > s.start + n)
        throw DataError("series " + s.country_code + ": test_end " + format_hour(sp.test_end) +
                        " beyond series end");

    auto slice = [&](HourStamp from, HourStamp to) {
        LoadSeries part;
        part.country_code = s.country_code;
        part.timezone_id = s.timezone_id;
        part.local_time = s.local_time;
        part.start = from;
        auto i0 = static_cast<std::size_t>(from - s.start);
        auto i1 = static_cast<std::size_t>(to - s.start);
        part.values.assign(s.values.begin() + i0, s.values.begin() + i1);
        part.missing.assign(s.missing.begin() + i0, s.missing.begin() + i1);
        return part;
    };
    return {slice(s.start, sp.train_end), slice(sp.train_end, sp.val_end),
            slice(sp.val_end, sp.test_end)};
}

}  // namespace loadcast
