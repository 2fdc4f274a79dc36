#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "loadcast/errors.hpp"
#include "loadcast/series.hpp"
#include "loadcast/time.hpp"

namespace loadcast {

// Average load shapes by local hour-of-day, weekday (Monday-first) and month.
struct LoadProfiles {
    std::array<double, 24> daily{};
    std::array<double, 7> weekly{};
    std::array<double, 12> yearly{};
};

inline LoadProfiles compute_profiles(const LoadSeries& s) {
    std::array<double, 24> dsum{};
    std::array<std::size_t, 24> dcnt{};
    std::array<double, 7> wsum{};
    std::array<std::size_t, 7> wcnt{};
    std::array<double, 12> ysum{};
    std::array<std::size_t, 12> ycnt{};

    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.is_missing(i)) continue;
        HourStamp h = s.stamp_at(i);
        double v = s.values[i];
        int hod = hour_of_day(h);
        dsum[hod] += v;
        ++dcnt[hod];
        int dow = day_of_week(h);
        wsum[dow] += v;
        ++wcnt[dow];
        int m = month_of(h) - 1;
        ysum[m] += v;
        ++ycnt[m];
    }

    LoadProfiles p;
    for (int h = 0; h < 24; ++h) {
        if (dcnt[h] == 0)
            throw DataError("series " + s.country_code + ": no samples at hour " + std::to_string(h));
        p.daily[h] = dsum[h] / static_cast<double>(dcnt[h]);
    }
    for (int d = 0; d < 7; ++d) {
        if (wcnt[d] == 0)
            throw DataError("series " + s.country_code + ": no samples on weekday " + std::to_string(d));
        p.weekly[d] = wsum[d] / static_cast<double>(wcnt[d]);
    }
    for (int m = 0; m < 12; ++m) {
        if (ycnt[m] == 0)
            throw DataError("series " + s.country_code + ": no samples in month " + std::to_string(m + 1));
        p.yearly[m] = ysum[m] / static_cast<double>(ycnt[m]);
    }
    return p;
}

// 43 components: min-max normalized daily[24] + weekly[7] + yearly[12].
// A constant sub-vector has no shape information and maps to all 0.5.
struct ProfileVector {
    std::string country_code;
    std::array<double, 43> components{};
};

namespace detail {

template <std::size_t N>
inline void minmax_normalize(const std::array<double, N>& in, double* out) {
    double lo = in[0], hi = in[0];
    for (double v : in) {
        if (v < lo) lo = v;
        if (v > hi) hi = v;
    }
    if (hi == lo) {
        for (std::size_t i = 0; i < N; ++i) out[i] = 0.5;
        return;
    }
    for (std::size_t i = 0; i < N; ++i) out[i] = (in[i] - lo) / (hi - lo);
}

}  // namespace detail

inline ProfileVector build_profile_vector(const LoadProfiles& p, const std::string& country_code) {
    ProfileVector v;
    v.country_code = country_code;
    detail::minmax_normalize(p.daily, v.components.data());
    detail::minmax_normalize(p.weekly, v.components.data() + 24);
    detail::minmax_normalize(p.yearly, v.components.data() + 31);
    return v;
}

}  // namespace loadcast
