#pragma once

#include <cmath>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/series.hpp"

namespace loadcast {

// Per-country z-score scaling, fit on the train partition only. Population
// standard deviation: fit on {0,2} gives mean 1, std 1.
struct Scaler {
    double mean = 0.0;
    double stddev = 1.0;

    double apply(double x) const { return (x - mean) / stddev; }
    double invert(double z) const { return z * stddev + mean; }
};

inline Scaler fit_scaler(const LoadSeries& train) {
    double sum = 0;
    std::size_t cnt = 0;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (!train.is_missing(i)) {
            sum += train.values[i];
            ++cnt;
        }
    if (cnt < 2) throw DataError("series " + train.country_code + ": need >= 2 samples to fit a scaler");
    double mean = sum / static_cast<double>(cnt);
    double ss = 0;
    for (std::size_t i = 0; i < train.size(); ++i)
        if (!train.is_missing(i)) ss += (train.values[i] - mean) * (train.values[i] - mean);
    double stddev = std::sqrt(ss / static_cast<double>(cnt));
    if (stddev <= 0)
        throw DataError("series " + train.country_code + " is constant; scaler undefined");
    return {mean, stddev};
}

inline std::vector<double> apply_scaler(const Scaler& sc, const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = sc.apply(xs[i]);
    return out;
}

inline std::vector<double> invert_scaler(const Scaler& sc, const std::vector<double>& zs) {
    std::vector<double> out(zs.size());
    for (std::size_t i = 0; i < zs.size(); ++i) out[i] = sc.invert(zs[i]);
    return out;
}

}  // namespace loadcast
