#pragma once

#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

// Day-ahead training samples: each target is the 24 hours of one calendar
// day, each input the l hours preceding it. `origin` tracks the source
// country per sample so pooled multi-country sets can be evaluated per
// country later.
struct WindowSet {
    int lookback = 0;
    int horizon = 24;
    std::vector<std::vector<double>> inputs;
    std::vector<std::vector<double>> targets;
    std::vector<HourStamp> target_start;  // stamp of the target day's first hour
    std::vector<int> origin;              // index into origins, one per sample
    std::vector<std::string> origins;     // country codes

    std::size_t size() const { return inputs.size(); }
};

// Anchors at local midnight with stride 24 by default; stride 1 turns every
// hour into an anchor. The series must be dense over every emitted range.
inline WindowSet make_windows(const LoadSeries& s, int lookback, int horizon = 24, int stride = 24) {
    if (lookback < 1 || horizon < 1 || stride < 1) throw ConfigError("window parameters must be positive");
    const auto n = static_cast<HourStamp>(s.size());
    if (n < lookback + horizon)
        throw DataError("series " + s.country_code + " too short for lookback " +
                        std::to_string(lookback) + " + horizon " + std::to_string(horizon));

    WindowSet ws;
    ws.lookback = lookback;
    ws.horizon = horizon;
    ws.origins.push_back(s.country_code);

    HourStamp first = s.start + lookback;
    if (stride == 24) {
        while (hour_of_day(first) != 0) ++first;
    }
    for (HourStamp t = first; t + horizon <= s.start + n; t += stride) {
        auto w0 = static_cast<std::size_t>(t - lookback - s.start);
        std::vector<double> in(s.values.begin() + w0, s.values.begin() + w0 + lookback);
        std::vector<double> tgt(s.values.begin() + w0 + lookback, s.values.begin() + w0 + lookback + horizon);
        for (std::size_t i = w0; i < w0 + static_cast<std::size_t>(lookback + horizon); ++i)
            if (s.is_missing(i))
                throw DataError("series " + s.country_code + " has a missing sample at " +
                                format_hour(s.stamp_at(i)) + "; impute before windowing");
        ws.inputs.push_back(std::move(in));
        ws.targets.push_back(std::move(tgt));
        ws.target_start.push_back(t);
        ws.origin.push_back(0);
    }
    return ws;
}

// Splits samples by the partition holding the target day's first hour.
// With midnight-aligned boundaries every target day lands wholly in one
// partition.
struct WindowSplit {
    WindowSet train;
    WindowSet val;
    WindowSet test;
};

inline WindowSplit split_windows(const WindowSet& ws, const SplitSpec& sp) {
    validate_splits(sp);
    WindowSplit out;
    for (WindowSet* part : {&out.train, &out.val, &out.test}) {
        part->lookback = ws.lookback;
        part->horizon = ws.horizon;
        part->origins = ws.origins;
    }
    for (std::size_t i = 0; i < ws.size(); ++i) {
        HourStamp t = ws.target_start[i];
        WindowSet* dst = nullptr;
        if (t < sp.train_end)
            dst = &out.train;
        else if (t < sp.val_end)
            dst = &out.val;
        else if (t < sp.test_end)
            dst = &out.test;
        else
            continue;
        dst->inputs.push_back(ws.inputs[i]);
        dst->targets.push_back(ws.targets[i]);
        dst->target_start.push_back(ws.target_start[i]);
        dst->origin.push_back(ws.origin[i]);
    }
    return out;
}

inline void append_windows(WindowSet& dst, const WindowSet& src) {
    if (dst.lookback == 0 && dst.size() == 0) {
        dst.lookback = src.lookback;
        dst.horizon = src.horizon;
    }
    if (dst.lookback != src.lookback || dst.horizon != src.horizon)
        throw ConfigError("cannot pool window sets with different shapes");
    std::vector<int> remap(src.origins.size());
    for (std::size_t i = 0; i < src.origins.size(); ++i) {
        int found = -1;
        for (std::size_t j = 0; j < dst.origins.size(); ++j)
            if (dst.origins[j] == src.origins[i]) {
                found = static_cast<int>(j);
                break;
            }
        if (found < 0) {
            dst.origins.push_back(src.origins[i]);
            found = static_cast<int>(dst.origins.size()) - 1;
        }
        remap[i] = found;
    }
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst.inputs.push_back(src.inputs[i]);
        dst.targets.push_back(src.targets[i]);
        dst.target_start.push_back(src.target_start[i]);
        dst.origin.push_back(remap[src.origin[i]]);
    }
}

}  // namespace loadcast
