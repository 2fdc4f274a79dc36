#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "loadcast/csv.hpp"
#include "loadcast/errors.hpp"
#include "loadcast/series.hpp"
#include "loadcast/timezone.hpp"

namespace loadcast {

// Curation pipeline, applied in this fixed order:
//   duplicates -> outliers -> localization -> imputation.

struct OutlierEntry {
    HourStamp stamp;
    double value;
    double month_mean;
    double month_std;
};

struct OutlierReport {
    std::string country_code;
    std::vector<OutlierEntry> removed;
    double threshold_multiplier = 4.5;
};

struct ImputationParams {
    double a = 0.3;
    int history_weeks = 4;
};

struct LogEntry {
    HourStamp stamp;
    std::string original;
    std::string action;
    std::string detail;
};

using WrangleLog = std::vector<LogEntry>;

struct DedupResult {
    LoadSeries series;
    std::size_t dropped = 0;
};

// Keep-first per timestamp; output is a dense series over [min,max] stamps.
inline DedupResult remove_duplicates(std::vector<RawRow> rows, const CountryMeta& meta,
                                     WrangleLog* log = nullptr) {
    DedupResult out;
    out.series.country_code = meta.code;
    out.series.timezone_id = meta.timezone_id;
    out.series.local_time = false;
    if (rows.empty()) return out;

    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.stamp < b.stamp; });
    HourStamp lo = rows.front().stamp;
    HourStamp hi = rows.back().stamp;
    auto n = static_cast<std::size_t>(hi - lo + 1);
    out.series.start = lo;
    out.series.values.assign(n, 0.0);
    out.series.missing.assign(n, 1);

    std::vector<std::uint8_t> seen(n, 0);
    for (const auto& r : rows) {
        auto i = static_cast<std::size_t>(r.stamp - lo);
        if (seen[i]) {
            ++out.dropped;
            if (log) {
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.6f", r.value);
                log->push_back({r.stamp, r.has_value ? buf : "", "drop_duplicate",
                                "kept first row at this timestamp"});
            }
            continue;
        }
        seen[i] = 1;
        if (r.has_value) {
            out.series.values[i] = r.value;
            out.series.missing[i] = 0;
        }
    }
    validate_series(out.series);
    return out;
}

// Per (calendar-year, month) groups within the series; population std over
// the group's non-missing values; groups with <2 usable samples are left
// alone. Strict exceedance: |x-mu| must be > multiplier*sigma.
inline std::pair<LoadSeries, OutlierReport> remove_outliers(const LoadSeries& s, double multiplier,
                                                            WrangleLog* log = nullptr) {
    if (multiplier <= 0) throw ConfigError("outlier multiplier must be positive");
    LoadSeries out = s;
    OutlierReport report;
    report.country_code = s.country_code;
    report.threshold_multiplier = multiplier;

    std::map<std::pair<int, int>, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < s.size(); ++i) {
        HourStamp h = s.stamp_at(i);
        groups[{year_of(h), month_of(h)}].push_back(i);
    }
    for (const auto& [ym, idx] : groups) {
        double sum = 0;
        std::size_t cnt = 0;
        for (auto i : idx)
            if (!s.is_missing(i)) {
                sum += s.values[i];
                ++cnt;
            }
        if (cnt < 2) continue;
        double mean = sum / static_cast<double>(cnt);
        double ss = 0;
        for (auto i : idx)
            if (!s.is_missing(i)) ss += (s.values[i] - mean) * (s.values[i] - mean);
        double stddev = std::sqrt(ss / static_cast<double>(cnt));
        for (auto i : idx) {
            if (s.is_missing(i)) continue;
            if (std::fabs(s.values[i] - mean) > multiplier * stddev) {
                report.removed.push_back({s.stamp_at(i), s.values[i], mean, stddev});
                out.missing[i] = 1;
                out.values[i] = 0.0;
                if (log) {
                    char orig[64], det[128];
                    std::snprintf(orig, sizeof orig, "%.6f", s.values[i]);
                    std::snprintf(det, sizeof det, "month_mean=%.6f month_std=%.6f", mean, stddev);
                    log->push_back({s.stamp_at(i), orig, "outlier_removed", det});
                }
            }
        }
    }
    return {std::move(out), std::move(report)};
}

// Re-labels the hourly index in local wall-clock time. On a fall-back
// transition the two UTC hours landing on one local hour are averaged; the
// local hour skipped by spring-forward stays missing for imputation.
inline LoadSeries convert_to_local(const LoadSeries& s, WrangleLog* log = nullptr) {
    if (s.local_time) throw DataError("series " + s.country_code + " is already in local time");
    Timezone tz = timezone_from_id(s.timezone_id);
    LoadSeries out;
    out.country_code = s.country_code;
    out.timezone_id = s.timezone_id;
    out.local_time = true;
    if (s.size() == 0) return out;

    auto local_of = [&](HourStamp utc) {
        int off = tz.offset_minutes_at_utc(utc);
        if (off % 60 != 0)
            throw DataError("timezone " + s.timezone_id + " has a sub-hour offset; hourly series cannot be re-labeled");
        return utc + off / 60;
    };

    HourStamp lo = local_of(s.start);
    HourStamp hi = local_of(s.stamp_at(s.size() - 1));
    auto n = static_cast<std::size_t>(hi - lo + 1);
    std::vector<double> sum(n, 0.0);
    std::vector<int> cnt(n, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s.is_missing(i)) continue;
        auto j = static_cast<std::size_t>(local_of(s.stamp_at(i)) - lo);
        sum[j] += s.values[i];
        ++cnt[j];
    }
    out.start = lo;
    out.values.assign(n, 0.0);
    out.missing.assign(n, 1);
    for (std::size_t j = 0; j < n; ++j) {
        if (cnt[j] == 0) continue;
        out.values[j] = sum[j] / cnt[j];
        out.missing[j] = 0;
        if (cnt[j] > 1 && log) {
            char det[96];
            std::snprintf(det, sizeof det, "averaged %d UTC hours at fall-back", cnt[j]);
            log->push_back({lo + static_cast<HourStamp>(j), "", "fallback_average", det});
        }
    }
    return out;
}

// Scalar blend used for every interior gap sample: weight decays with the
// distance to the nearest real observation.
inline double impute_blend(double d, double a, double L, double H) {
    double w = std::exp(-a * d);
    return w * L + (1.0 - w) * H;
}

namespace detail {

// Historical estimate for sample i, computed from the pre-imputation mask:
// same hour-of-day and weekday over the previous weeks, then same hour over
// the previous 7 days, then the series mean.
inline double historical_estimate(const LoadSeries& s, std::size_t i, int history_weeks,
                                  double series_mean, const char** source) {
    double sum = 0;
    int cnt = 0;
    for (int k = 1; k <= history_weeks; ++k) {
        std::int64_t j = static_cast<std::int64_t>(i) - 168 * k;
        if (j < 0) continue;
        auto u = static_cast<std::size_t>(j);
        if (!s.is_missing(u)) {
            sum += s.values[u];
            ++cnt;
        }
    }
    if (cnt > 0) {
        *source = "weekly_history";
        return sum / cnt;
    }
    sum = 0;
    cnt = 0;
    for (int k = 1; k <= 7; ++k) {
        std::int64_t j = static_cast<std::int64_t>(i) - 24 * k;
        if (j < 0) continue;
        auto u = static_cast<std::size_t>(j);
        if (!s.is_missing(u)) {
            sum += s.values[u];
            ++cnt;
        }
    }
    if (cnt > 0) {
        *source = "daily_history";
        return sum / cnt;
    }
    *source = "series_mean";
    return series_mean;
}

}  // namespace detail

// Fills every missing sample with r = w*L + (1-w)*H where w = e^(-a*d).
// Boundary gaps with no bounding observation on one side use r = H.
// H always reads the original (pre-fill) observations, so the result does
// not depend on fill order.
inline std::pair<LoadSeries, std::size_t> impute(const LoadSeries& s, const ImputationParams& params,
                                                 WrangleLog* log = nullptr) {
    if (params.a <= 0) throw ConfigError("imputation decay parameter must be positive");
    if (params.history_weeks < 1) throw ConfigError("history_weeks must be >= 1");

    double series_sum = 0;
    std::size_t series_cnt = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
        if (!s.is_missing(i)) {
            series_sum += s.values[i];
            ++series_cnt;
        }
    if (series_cnt == 0) throw DataError("series " + s.country_code + " is entirely missing; cannot impute");
    double series_mean = series_sum / static_cast<double>(series_cnt);

    // prev[i]/next[i]: index of nearest non-missing sample at or before/after i.
    const std::size_t n = s.size();
    std::vector<std::int64_t> prev(n, -1), next(n, -1);
    std::int64_t last = -1;
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.is_missing(i)) last = static_cast<std::int64_t>(i);
        prev[i] = last;
    }
    last = -1;
    for (std::size_t i = n; i-- > 0;) {
        if (!s.is_missing(i)) last = static_cast<std::int64_t>(i);
        next[i] = last;
    }

    LoadSeries out = s;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!s.is_missing(i)) continue;
        const char* hsource = nullptr;
        double H = detail::historical_estimate(s, i, params.history_weeks, series_mean, &hsource);
        double r;
        char det[160];
        if (prev[i] < 0 || next[i] < 0) {
            r = H;
            std::snprintf(det, sizeof det, "boundary gap H=%.6f source=%s", H, hsource);
        } else {
            auto p = static_cast<double>(prev[i]);
            auto q = static_cast<double>(next[i]);
            double vp = s.values[static_cast<std::size_t>(prev[i])];
            double vq = s.values[static_cast<std::size_t>(next[i])];
            double L = vp + (vq - vp) * (static_cast<double>(i) - p) / (q - p);
            double d = std::min(static_cast<double>(i) - p, q - static_cast<double>(i));
            r = impute_blend(d, params.a, L, H);
            std::snprintf(det, sizeof det, "d=%g w=%.6f L=%.6f H=%.6f source=%s", d,
                          std::exp(-params.a * d), L, H, hsource);
        }
        out.values[i] = r;
        out.missing[i] = 0;
        ++count;
        if (log) log->push_back({s.stamp_at(i), "", "imputed", det});
    }
    return {std::move(out), count};
}

struct WrangledCountry {
    LoadSeries series;
    std::size_t duplicates_dropped = 0;
    OutlierReport outliers;
    std::size_t imputed = 0;
    WrangleLog log;
};

inline WrangledCountry wrangle_country(const std::vector<RawRow>& rows, const CountryMeta& meta,
                                       double outlier_multiplier, const ImputationParams& params) {
    WrangledCountry out;
    auto dedup = remove_duplicates(rows, meta, &out.log);
    out.duplicates_dropped = dedup.dropped;
    auto [no_outliers, report] = remove_outliers(dedup.series, outlier_multiplier, &out.log);
    out.outliers = std::move(report);
    LoadSeries local = convert_to_local(no_outliers, &out.log);
    auto [filled, count] = impute(local, params, &out.log);
    out.imputed = count;
    out.series = std::move(filled);
    return out;
}

inline void write_wrangle_log(const WrangleLog& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "timestamp,original,action,detail\n";
    for (const auto& e : log)
        out << format_hour(e.stamp) << ',' << e.original << ',' << e.action << ',' << e.detail << '\n';
}

}  // namespace loadcast
