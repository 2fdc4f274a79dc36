#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "loadcast/cluster.hpp"
#include "loadcast/errors.hpp"
#include "loadcast/evaluate.hpp"
#include "loadcast/hpo.hpp"
#include "loadcast/mlp.hpp"
#include "loadcast/scaler.hpp"
#include "loadcast/series.hpp"
#include "loadcast/train.hpp"
#include "loadcast/window.hpp"

namespace loadcast {

enum class SetupKind { Baseline, AbO, CbO, SNaive168 };

inline const char* setup_name(SetupKind s) {
    switch (s) {
        case SetupKind::Baseline: return "baseline";
        case SetupKind::AbO: return "abo";
        case SetupKind::CbO: return "cbo";
        case SetupKind::SNaive168: return "snaive";
    }
    return "baseline";
}

inline SetupKind setup_from_name(const std::string& name) {
    if (name == "baseline") return SetupKind::Baseline;
    if (name == "abo") return SetupKind::AbO;
    if (name == "cbo") return SetupKind::CbO;
    if (name == "snaive") return SetupKind::SNaive168;
    throw ConfigError("unknown setup '" + name + "' (expected baseline|abo|cbo|snaive)");
}

struct ExperimentPlan {
    SetupKind setup = SetupKind::Baseline;
    std::string target;
    std::vector<std::string> sources;
    SplitSpec splits;
    std::optional<Hyperparameters> hp;  // filled at the source/HPO stage
    int ensemble_size = 20;
    std::uint64_t master_seed = 0;
};

// AbO: everyone except the target. CbO: the target's cluster minus the
// target. Baseline and the seasonal naive train on the target alone.
inline std::vector<std::string> build_source_set(SetupKind setup, const std::string& target,
                                                 const std::vector<std::string>& all_countries,
                                                 const ClusterAssignment* clusters) {
    if (std::find(all_countries.begin(), all_countries.end(), target) == all_countries.end())
        throw ConfigError("target country " + target + " not in dataset");
    std::vector<std::string> out;
    switch (setup) {
        case SetupKind::Baseline:
        case SetupKind::SNaive168:
            return out;
        case SetupKind::AbO:
            for (const auto& c : all_countries)
                if (c != target) out.push_back(c);
            return out;
        case SetupKind::CbO: {
            if (!clusters) throw ConfigError("CbO needs a cluster assignment");
            auto it = clusters->cluster_of.find(target);
            if (it == clusters->cluster_of.end())
                throw ConfigError("target country " + target + " has no cluster");
            for (const auto& c : all_countries) {
                if (c == target) continue;
                auto jt = clusters->cluster_of.find(c);
                if (jt != clusters->cluster_of.end() && jt->second == it->second) out.push_back(c);
            }
            if (out.empty())
                throw ConfigError("target " + target + " sits alone in its cluster; use the abo setup instead");
            return out;
        }
    }
    return out;
}

// forecast[h] = value observed one week earlier at the same hour.
inline std::vector<double> snaive_forecast(const LoadSeries& s, HourStamp day_start) {
    if (day_start - 168 < s.start || day_start + 24 > s.start + static_cast<HourStamp>(s.size()))
        throw DataError("series " + s.country_code + ": not enough history for sNaive at " +
                        format_hour(day_start));
    std::vector<double> out(24);
    for (int h = 0; h < 24; ++h) {
        auto i = static_cast<std::size_t>(day_start - 168 + h - s.start);
        if (s.is_missing(i))
            throw DataError("series " + s.country_code + ": missing history for sNaive at " +
                            format_hour(s.stamp_at(i)));
        out[h] = s.values[i];
    }
    return out;
}

// Value copy of the source parameters; the target model is independent
// afterwards but starts bit-identical.
inline MLPModel warm_start(const MLPModel& source) { return source; }

inline std::vector<double> ensemble_predict(const std::vector<MLPModel>& members,
                                            const std::vector<double>& window) {
    if (members.empty()) throw ConfigError("empty ensemble");
    std::vector<double> sum(members.front().hp.horizon, 0.0);
    for (const auto& m : members) {
        auto y = forward(m, window);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += y[i];
    }
    for (auto& v : sum) v /= static_cast<double>(members.size());
    return sum;
}

// Scaled train/val/test windows for one country plus the pieces needed to
// get back to MW.
struct PreparedCountry {
    std::string code;
    LoadSeries series;  // localized, imputed, MW
    Scaler scaler;      // fit on the train partition only
};

class ExperimentData {
public:
    ExperimentData(const Dataset& ds, int horizon = 24, int stride = 24)
        : splits_(ds.splits), horizon_(horizon), stride_(stride) {
        for (const auto& [code, series] : ds.series) {
            PreparedCountry pc;
            pc.code = code;
            pc.series = series;
            auto parts = split_series(series, ds.splits);
            pc.scaler = fit_scaler(parts.train);
            countries_.emplace(code, std::move(pc));
        }
    }

    const SplitSpec& splits() const { return splits_; }
    int horizon() const { return horizon_; }

    std::vector<std::string> country_codes() const {
        std::vector<std::string> out;
        for (const auto& [code, pc] : countries_) out.push_back(code);
        return out;
    }

    const PreparedCountry& country(const std::string& code) const {
        auto it = countries_.find(code);
        if (it == countries_.end()) throw ConfigError("unknown country " + code);
        return it->second;
    }

    // Scaled day-ahead windows, built lazily per lookback and cached.
    const WindowSplit& windows(const std::string& code, int lookback) {
        auto key = std::make_pair(code, lookback);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const PreparedCountry& pc = country(code);
        LoadSeries scaled = pc.series;
        for (auto& v : scaled.values) v = pc.scaler.apply(v);
        WindowSet all = make_windows(scaled, lookback, horizon_, stride_);
        return cache_.emplace(key, split_windows(all, splits_)).first->second;
    }

    // Concatenated source-country windows, each country scaled by its own
    // train-fit scaler.
    WindowSet pooled(const std::vector<std::string>& codes, int lookback, int part) {
        WindowSet out;
        for (const auto& code : codes) {
            const WindowSplit& ws = windows(code, lookback);
            const WindowSet& src = part == 0 ? ws.train : (part == 1 ? ws.val : ws.test);
            append_windows(out, src);
        }
        return out;
    }

private:
    std::map<std::string, PreparedCountry> countries_;
    std::map<std::pair<std::string, int>, WindowSplit> cache_;
    SplitSpec splits_;
    int horizon_;
    int stride_;
};

// Validation MAPE in MW over a (possibly pooled) window set: forecasts and
// targets are un-scaled per sample origin before entering the formula.
inline double window_set_mape(const std::vector<MLPModel>& members, const WindowSet& ws,
                              ExperimentData& data) {
    if (ws.size() == 0) throw DataError("cannot evaluate MAPE on an empty window set");
    std::vector<double> actuals, forecasts;
    actuals.reserve(ws.size() * ws.horizon);
    forecasts.reserve(ws.size() * ws.horizon);
    for (std::size_t i = 0; i < ws.size(); ++i) {
        const Scaler& sc = data.country(ws.origins[ws.origin[i]]).scaler;
        auto yhat = ensemble_predict(members, ws.inputs[i]);
        for (int h = 0; h < ws.horizon; ++h) {
            actuals.push_back(sc.invert(ws.targets[i][h]));
            forecasts.push_back(sc.invert(yhat[h]));
        }
    }
    return mape(actuals, forecasts);
}

struct ExperimentOptions {
    SearchSpace space = SearchSpace::defaults();
    int hpo_trials = 100;
    TrainConfig train_cfg;        // seed field is overridden per stage
    Activation act = Activation::ReLU;
    int ensemble_size = 20;
};

// Trains `n` members with derived seeds. Fresh mode draws a new init per
// member; warm mode copies the source parameters into every member, so
// members differ only through shuffling.
inline std::vector<TrainResult> train_ensemble(const Hyperparameters& hp, Activation act,
                                               const WindowSet& train_ws, const WindowSet& val_ws,
                                               const TrainConfig& base_cfg, int n,
                                               std::uint64_t master_seed,
                                               const MLPModel* warm_source = nullptr) {
    if (n < 1) throw ConfigError("ensemble size must be >= 1");
    std::vector<TrainResult> out;
    for (int i = 0; i < n; ++i) {
        auto attempt = [&](std::uint64_t salt) {
            MLPModel init = warm_source ? warm_start(*warm_source)
                                        : make_mlp(hp, act,
                                                   derive_seed(master_seed, "init",
                                                               static_cast<std::uint64_t>(i) * 2 + salt));
            TrainConfig cfg = base_cfg;
            cfg.seed = derive_seed(master_seed, salt ? "member-retry" : "member",
                                   static_cast<std::uint64_t>(i));
            return train(std::move(init), train_ws, val_ws, cfg);
        };
        try {
            out.push_back(attempt(0));
        } catch (const TrainingError&) {
            out.push_back(attempt(1));  // one retry with an alternate seed, then give up
        }
    }
    return out;
}

struct ExperimentResult {
    std::string target;
    SetupKind setup = SetupKind::Baseline;
    double test_mape = 0.0;
    std::vector<HourStamp> stamps;  // test hours, in order
    std::vector<double> actuals;    // MW
    std::vector<double> forecasts;  // MW
    Hyperparameters hp;
    double mean_epochs = 0.0;    // mean epochs_run over ensemble members
    double source_seconds = 0.0; // source HPO + pre-training
    double target_seconds = 0.0; // target-side (fine-tuning or baseline training)
    StudyState study;
    bool has_study = false;
    std::vector<MLPModel> members;
    MLPModel source_model;
    bool has_source_model = false;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Shared trial evaluator: train one model on the given windows, report
// rung losses to the probe, objective = validation MAPE in MW.
inline double evaluate_trial(const Hyperparameters& hp, std::uint64_t trial_seed, PruneProbe& probe,
                             const WindowSet& train_ws, const WindowSet& val_ws, ExperimentData& data,
                             const ExperimentOptions& opt) {
    MLPModel model = make_mlp(hp, opt.act, derive_seed(trial_seed, "init", 0));
    TrainConfig cfg = opt.train_cfg;
    cfg.seed = derive_seed(trial_seed, "train", 0);
    PruneHook hook = [&](int epoch, double val_loss) { return probe.report(epoch, val_loss); };
    TrainResult res = train(std::move(model), train_ws, val_ws, cfg, hook);
    if (res.pruned) return std::numeric_limits<double>::quiet_NaN();
    std::vector<MLPModel> single{res.model};
    return window_set_mape(single, val_ws, data);
}

}  // namespace detail

// One (setup, target) experiment end to end. For transfer setups the study
// and pre-training run on the pooled sources; hyperparameter tuning is
// bypassed on the target side, which inherits the source configuration.
inline ExperimentResult run_experiment(ExperimentData& data, SetupKind setup, const std::string& target,
                                       const ClusterAssignment* clusters, const ExperimentOptions& opt,
                                       std::uint64_t master_seed) {
    ExperimentResult res;
    res.target = target;
    res.setup = setup;
    const PreparedCountry& tc = data.country(target);
    std::uint64_t exp_seed = derive_seed(master_seed, std::string("exp:") + setup_name(setup) + ":" + target, 0);

    if (setup == SetupKind::SNaive168) {
        // Forecast the same day-ahead targets the neural setups see with the
        // shortest lookback that still guarantees one week of history.
        const WindowSplit& ws = data.windows(target, 168);
        for (std::size_t i = 0; i < ws.test.size(); ++i) {
            HourStamp t = ws.test.target_start[i];
            auto f = snaive_forecast(tc.series, t);
            for (int h = 0; h < 24; ++h) {
                auto idx = static_cast<std::size_t>(t + h - tc.series.start);
                res.stamps.push_back(t + h);
                res.actuals.push_back(tc.series.values[idx]);
                res.forecasts.push_back(f[h]);
            }
        }
        res.test_mape = mape(res.actuals, res.forecasts);
        return res;
    }

    std::vector<std::string> sources = build_source_set(setup, target, data.country_codes(), clusters);
    const bool transfer = !sources.empty();

    Hyperparameters best_hp;
    const MLPModel* warm = nullptr;
    MLPModel source_model;

    if (transfer) {
        auto t0 = std::chrono::steady_clock::now();
        TrialEvaluator ev = [&](const Hyperparameters& hp, std::uint64_t trial_seed, PruneProbe& probe) {
            WindowSet train_ws = data.pooled(sources, hp.lookback, 0);
            WindowSet val_ws = data.pooled(sources, hp.lookback, 1);
            return detail::evaluate_trial(hp, trial_seed, probe, train_ws, val_ws, data, opt);
        };
        StudyResult study = run_study(ev, opt.space, opt.hpo_trials, derive_seed(exp_seed, "hpo", 0));
        best_hp = study.best.hp;
        res.study = std::move(study.state);
        res.has_study = true;

        WindowSet train_ws = data.pooled(sources, best_hp.lookback, 0);
        WindowSet val_ws = data.pooled(sources, best_hp.lookback, 1);
        MLPModel init = make_mlp(best_hp, opt.act, derive_seed(exp_seed, "source-init", 0));
        TrainConfig cfg = opt.train_cfg;
        cfg.seed = derive_seed(exp_seed, "source-train", 0);
        TrainResult src = train(std::move(init), train_ws, val_ws, cfg);
        source_model = std::move(src.model);
        warm = &source_model;
        res.source_model = source_model;
        res.has_source_model = true;
        res.source_seconds = detail::seconds_since(t0);
    } else {
        auto t0 = std::chrono::steady_clock::now();
        TrialEvaluator ev = [&](const Hyperparameters& hp, std::uint64_t trial_seed, PruneProbe& probe) {
            const WindowSplit& ws = data.windows(target, hp.lookback);
            return detail::evaluate_trial(hp, trial_seed, probe, ws.train, ws.val, data, opt);
        };
        StudyResult study = run_study(ev, opt.space, opt.hpo_trials, derive_seed(exp_seed, "hpo", 0));
        best_hp = study.best.hp;
        res.study = std::move(study.state);
        res.has_study = true;
        res.source_seconds = detail::seconds_since(t0);
    }
    res.hp = best_hp;

    auto t1 = std::chrono::steady_clock::now();
    const WindowSplit& tws = data.windows(target, best_hp.lookback);
    if (tws.val.size() == 0 || tws.test.size() == 0)
        throw DataError("target " + target + " has an empty validation or test partition");
    std::vector<TrainResult> trained =
        train_ensemble(best_hp, opt.act, tws.train, tws.val, opt.train_cfg, opt.ensemble_size,
                       derive_seed(exp_seed, "ensemble", 0), warm);
    res.target_seconds = detail::seconds_since(t1);

    double epoch_sum = 0;
    for (auto& tr : trained) {
        epoch_sum += tr.epochs_run;
        res.members.push_back(std::move(tr.model));
    }
    res.mean_epochs = epoch_sum / static_cast<double>(trained.size());

    for (std::size_t i = 0; i < tws.test.size(); ++i) {
        auto yhat = ensemble_predict(res.members, tws.test.inputs[i]);
        HourStamp t = tws.test.target_start[i];
        for (int h = 0; h < data.horizon(); ++h) {
            res.stamps.push_back(t + h);
            res.actuals.push_back(tc.scaler.invert(tws.test.targets[i][h]));
            res.forecasts.push_back(tc.scaler.invert(yhat[h]));
        }
    }
    res.test_mape = mape(res.actuals, res.forecasts);
    return res;
}

inline void write_forecast_csv(const ExperimentResult& res, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "timestamp,actual_mw,forecast_mw\n";
    char a[64], f[64];
    for (std::size_t i = 0; i < res.stamps.size(); ++i) {
        std::snprintf(a, sizeof a, "%.6f", res.actuals[i]);
        std::snprintf(f, sizeof f, "%.6f", res.forecasts[i]);
        out << format_hour(res.stamps[i]) << ',' << a << ',' << f << '\n';
    }
}

}  // namespace loadcast
