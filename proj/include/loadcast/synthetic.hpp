#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/series.hpp"
#include "loadcast/time.hpp"

namespace loadcast {

// Synthetic demand generator. Each family owns smooth periodic shapes for the
// daily, weekly and yearly cycles (truncated Fourier, normalized to [-1,1]);
// a country's load is
//   base * (1 + A_d*d(hour) + A_w*w(dow) + A_y*y(month)) + N(0, sigma*base).
// Countries are emitted family-major, so the planted family of the j-th
// country is j / countries_per_family.

struct ProfileFamily {
    double daily_amp = 0.25;
    double weekly_amp = 0.10;
    double yearly_amp = 0.15;
    double noise_sigma = 0.025;  // relative to base
    double daily_phase = 0.0, daily_phase2 = 0.0;
    double weekly_phase = 0.0, weekly_phase2 = 0.0;
    double yearly_phase = 0.0, yearly_phase2 = 0.0;

    double daily_shape(int hod) const {
        double t = hod / 24.0;
        return (std::cos(2 * kPi * (t - daily_phase)) + 0.4 * std::cos(4 * kPi * (t - daily_phase2))) / 1.4;
    }
    double weekly_shape(int dow) const {
        double t = dow / 7.0;
        return (std::cos(2 * kPi * (t - weekly_phase)) + 0.3 * std::sin(4 * kPi * (t - weekly_phase2))) / 1.3;
    }
    double yearly_shape(int month) const {
        double t = (month - 1) / 12.0;
        return (std::cos(2 * kPi * (t - yearly_phase)) + 0.3 * std::cos(4 * kPi * (t - yearly_phase2))) / 1.3;
    }

    static constexpr double kPi = 3.141592653589793238462643383279;
};

// Deterministic, index-distinct shape parameters. Phases step by irrational
// fractions so no two families coincide.
inline ProfileFamily make_family(int index) {
    ProfileFamily f;
    f.daily_phase = 0.25 + 0.381966011 * index;   // golden-ratio stepping
    f.daily_phase2 = 0.10 + 0.618033989 * index;
    f.weekly_phase = 0.05 + 0.381966011 * index;
    f.weekly_phase2 = 0.30 + 0.145898034 * index;
    f.yearly_phase = 0.55 + 0.381966011 * index;
    f.yearly_phase2 = 0.15 + 0.618033989 * index;
    return f;
}

inline void validate_family(const ProfileFamily& f) {
    if (f.daily_amp < 0 || f.weekly_amp < 0 || f.yearly_amp < 0 || f.noise_sigma < 0)
        throw ConfigError("profile family amplitudes and noise must be non-negative");
    if (f.daily_amp + f.weekly_amp + f.yearly_amp >= 1.0)
        throw ConfigError("profile family amplitudes sum to >= 1, loads could go negative");
}

inline std::string synthetic_code(int index) {
    std::string c = "AA";
    c[0] = static_cast<char>('A' + index / 26);
    c[1] = static_cast<char>('A' + index % 26);
    return c;
}

// Series are generated directly in the local frame (zone "UTC"), covering
// whole calendar years from 2015; every calendar day contributes all 24
// hours, which keeps the noise-free daily profile an exact affine image of
// the family's daily shape.
inline Dataset synthesize_dataset(std::uint64_t seed, const std::vector<ProfileFamily>& families,
                                  int countries_per_family, int years) {
    if (families.empty()) throw ConfigError("need at least one profile family");
    if (countries_per_family < 1) throw ConfigError("countries_per_family must be >= 1");
    if (years < 2) throw ConfigError("need >= 2 years for train/val/test splits");
    for (const auto& f : families) validate_family(f);

    const int start_year = 2015;
    const HourStamp start = make_hour(start_year, 1, 1, 0);
    const HourStamp end = make_hour(start_year + years, 1, 1, 0);
    const auto n = static_cast<std::size_t>(end - start);

    Dataset ds;
    int country_index = 0;
    for (std::size_t fi = 0; fi < families.size(); ++fi) {
        const ProfileFamily& fam = families[fi];
        for (int c = 0; c < countries_per_family; ++c, ++country_index) {
            std::string code = synthetic_code(country_index);
            Rng base_rng(derive_seed(seed, "base", static_cast<std::uint64_t>(country_index)));
            double base = base_rng.uniform(500.0, 15000.0);
            Rng noise(derive_seed(seed, "noise", static_cast<std::uint64_t>(country_index)));

            LoadSeries s;
            s.country_code = code;
            s.timezone_id = "UTC";
            s.start = start;
            s.local_time = true;
            s.values.resize(n);
            s.missing.assign(n, 0);
            for (std::size_t i = 0; i < n; ++i) {
                HourStamp h = start + static_cast<HourStamp>(i);
                double v = base * (1.0 + fam.daily_amp * fam.daily_shape(hour_of_day(h)) +
                                   fam.weekly_amp * fam.weekly_shape(day_of_week(h)) +
                                   fam.yearly_amp * fam.yearly_shape(month_of(h)));
                if (fam.noise_sigma > 0) v += noise.normal(0.0, fam.noise_sigma * base);
                s.values[i] = std::max(v, 0.01 * base);
            }
            CountryMeta meta;
            meta.code = code;
            meta.display_name = "Synthetic " + code + " (family " + std::to_string(fi) + ")";
            meta.timezone_id = "UTC";
            ds.meta[code] = meta;
            ds.series[code] = std::move(s);
        }
    }
    ds.splits.train_end = make_hour(start_year + years - 2, 1, 1, 0);
    ds.splits.val_end = make_hour(start_year + years - 1, 1, 1, 0);
    ds.splits.test_end = end;
    return ds;
}

}  // namespace loadcast
