#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "loadcast/cluster.hpp"
#include "loadcast/errors.hpp"

namespace loadcast {

// Mean absolute percentage error: (1/m) * sum |(Y - F)/Y| * 100.
// A zero actual means the pipeline fed unsanitized data; abort loudly
// rather than guarding with an epsilon.
inline double mape(const std::vector<double>& actuals, const std::vector<double>& forecasts) {
    if (actuals.size() != forecasts.size())
        throw DataError("mape: length mismatch (" + std::to_string(actuals.size()) + " vs " +
                        std::to_string(forecasts.size()) + ")");
    if (actuals.empty()) throw DataError("mape: no samples");
    double sum = 0.0;
    for (std::size_t i = 0; i < actuals.size(); ++i) {
        if (actuals[i] == 0.0) throw DataError("mape: zero actual at index " + std::to_string(i));
        sum += std::fabs((actuals[i] - forecasts[i]) / actuals[i]);
    }
    return sum / static_cast<double>(actuals.size()) * 100.0;
}

// rows: country -> setup -> test MAPE %. Canonical setup names are
// "snaive", "baseline", "abo", "cbo"; "abo"/"cbo" are the transfer setups.
using ReportRows = std::map<std::string, std::map<std::string, double>>;

inline const std::vector<std::string>& transfer_setups() {
    static const std::vector<std::string> s{"abo", "cbo"};
    return s;
}

struct ClusterSummary {
    std::map<int, std::map<std::string, double>> averages;  // cluster -> setup -> mean MAPE
    std::map<int, std::string> best_transfer;               // argmin over transfer setups
};

// Unweighted mean of country MAPEs within each cluster, per setup. Every
// country must carry the same setup set.
inline ClusterSummary summarize(const ReportRows& rows, const ClusterAssignment& clusters) {
    ClusterSummary out;
    std::map<int, int> counts;
    for (const auto& [country, setups] : rows) {
        auto it = clusters.cluster_of.find(country);
        if (it == clusters.cluster_of.end())
            throw DataError("country " + country + " has no cluster assignment");
        for (const auto& [setup, value] : setups) out.averages[it->second][setup] += value;
        ++counts[it->second];
    }
    for (auto& [cl, setups] : out.averages) {
        for (auto& [setup, value] : setups) value /= counts[cl];
        double best = std::numeric_limits<double>::infinity();
        std::string best_name;
        for (const auto& name : transfer_setups()) {
            auto it = setups.find(name);
            if (it != setups.end() && it->second < best) {
                best = it->second;
                best_name = name;
            }
        }
        out.best_transfer[cl] = best_name;
    }
    return out;
}

// Average improvement vs the baseline: mean over countries of
// (baseline - setup), plus "best_tl" = mean of (baseline - min over
// transfer setups). Positive numbers mean the setup beats the baseline.
inline std::map<std::string, double> improvement_table(const ReportRows& rows) {
    std::map<std::string, double> sums;
    std::map<std::string, int> counts;
    double best_tl_sum = 0.0;
    int best_tl_count = 0;
    for (const auto& [country, setups] : rows) {
        auto base = setups.find("baseline");
        if (base == setups.end()) throw DataError("country " + country + " is missing a baseline row");
        for (const auto& [setup, value] : setups) {
            if (setup == "baseline") continue;
            sums[setup] += base->second - value;
            ++counts[setup];
        }
        double best = std::numeric_limits<double>::infinity();
        bool any = false;
        for (const auto& name : transfer_setups()) {
            auto it = setups.find(name);
            if (it != setups.end()) {
                best = std::min(best, it->second);
                any = true;
            }
        }
        if (any) {
            best_tl_sum += base->second - best;
            ++best_tl_count;
        }
    }
    std::map<std::string, double> out;
    for (const auto& [setup, sum] : sums) out[setup] = sum / counts[setup];
    if (best_tl_count > 0) out["best_tl"] = best_tl_sum / best_tl_count;
    return out;
}

// Per-country best among the neural setups (the seasonal-naive benchmark
// is excluded from "best"): ties go to the lexicographically first name.
inline std::map<std::string, std::string> best_setup_per_country(const ReportRows& rows) {
    std::map<std::string, std::string> out;
    for (const auto& [country, setups] : rows) {
        double best = std::numeric_limits<double>::infinity();
        std::string name;
        for (const auto& [setup, value] : setups) {
            if (setup == "snaive") continue;
            if (value < best) {
                best = value;
                name = setup;
            }
        }
        out[country] = name;
    }
    return out;
}

namespace detail {

inline std::string fmt2(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace detail

// Country table, one row per country plus the average-improvement footer:
// country,cluster,baseline,abo,cbo,snaive,best. The best cell carries the
// winning MAPE and setup name, e.g. "2.37 (abo)".
inline void write_country_table(const ReportRows& rows, const ClusterAssignment& clusters,
                                const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "country,cluster,baseline,abo,cbo,snaive,best\n";
    auto cell = [](const std::map<std::string, double>& setups, const char* name) {
        auto it = setups.find(name);
        return it == setups.end() ? std::string() : detail::fmt2(it->second);
    };
    for (const auto& [country, setups] : rows) {
        auto cl = clusters.cluster_of.find(country);
        std::string cluster_cell = cl == clusters.cluster_of.end() ? std::string()
                                                                   : std::to_string(cl->second);
        double best = std::numeric_limits<double>::infinity();
        std::string best_name;
        for (const auto& [setup, value] : setups) {
            if (setup == "snaive") continue;
            if (value < best) {
                best = value;
                best_name = setup;
            }
        }
        out << country << ',' << cluster_cell << ',' << cell(setups, "baseline") << ','
            << cell(setups, "abo") << ',' << cell(setups, "cbo") << ',' << cell(setups, "snaive")
            << ',' << detail::fmt2(best) << " (" << best_name << ")\n";
    }
    auto imp = improvement_table(rows);
    auto icell = [&](const char* name) {
        auto it = imp.find(name);
        return it == imp.end() ? std::string() : detail::fmt2(it->second);
    };
    out << "improvement,,-," << icell("abo") << ',' << icell("cbo") << ',' << icell("snaive") << ','
        << icell("best_tl") << " (tl)\n";
}

// Cluster table: cluster,baseline,abo,cbo,snaive,best_setup, where the best
// column is the argmin over the transfer setups only.
inline void write_cluster_table(const ReportRows& rows, const ClusterAssignment& clusters,
                                const std::string& path) {
    ClusterSummary cs = summarize(rows, clusters);
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "cluster,baseline,abo,cbo,snaive,best_setup\n";
    for (const auto& [cl, setups] : cs.averages) {
        auto cell = [&](const char* name) {
            auto it = setups.find(name);
            return it == setups.end() ? std::string() : detail::fmt2(it->second);
        };
        out << cl << ',' << cell("baseline") << ',' << cell("abo") << ',' << cell("cbo") << ','
            << cell("snaive") << ',' << cs.best_transfer[cl] << '\n';
    }
}

}  // namespace loadcast
