#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "loadcast/cluster.hpp"
#include "loadcast/csv.hpp"
#include "loadcast/errors.hpp"
#include "loadcast/evaluate.hpp"
#include "loadcast/experiment.hpp"
#include "loadcast/hpo.hpp"
#include "loadcast/profile.hpp"
#include "loadcast/svg.hpp"
#include "loadcast/synthetic.hpp"
#include "loadcast/wrangle.hpp"

namespace loadcast {

// Plain-text configuration (key = value, '#' comments) plus the stage
// implementations behind the CLI subcommands. Artifacts are files under
// out.dir; every stage re-reads what earlier stages wrote, so the pipeline
// can be resumed or partially re-run.

struct PipelineConfig {
    std::string manifest;  // when empty, a synthetic dataset is generated
    int syn_families = 2;
    int syn_countries_per_family = 3;
    int syn_years = 3;
    std::string train_end, val_end, test_end;  // timestamps; optional for synthetic data
    int cluster_k = 4;
    int hpo_trials = 100;
    int ensemble_size = 20;
    double impute_a = 0.3;
    int impute_history_weeks = 4;
    double outlier_multiplier = 4.5;
    std::uint64_t seed = 42;
    std::string out_dir = "out";
    int max_epochs = 200;
    int patience = 10;
    std::string activation = "relu";
    std::string search_preset = "paper";  // paper | desk
    int stride = 24;
};

inline void set_config_key(PipelineConfig& cfg, const std::string& key, const std::string& value) {
    auto to_int = [&](const std::string& v) {
        try {
            return std::stoi(v);
        } catch (...) {
            throw ConfigError("bad integer for " + key + ": '" + v + "'");
        }
    };
    auto to_double = [&](const std::string& v) {
        try {
            return std::stod(v);
        } catch (...) {
            throw ConfigError("bad number for " + key + ": '" + v + "'");
        }
    };
    if (key == "data.manifest")
        cfg.manifest = value;
    else if (key == "data.families")
        cfg.syn_families = to_int(value);
    else if (key == "data.countries_per_family")
        cfg.syn_countries_per_family = to_int(value);
    else if (key == "data.years")
        cfg.syn_years = to_int(value);
    else if (key == "split.train_end")
        cfg.train_end = value;
    else if (key == "split.val_end")
        cfg.val_end = value;
    else if (key == "split.test_end")
        cfg.test_end = value;
    else if (key == "cluster.k")
        cfg.cluster_k = to_int(value);
    else if (key == "hpo.trials")
        cfg.hpo_trials = to_int(value);
    else if (key == "ensemble.size")
        cfg.ensemble_size = to_int(value);
    else if (key == "impute.a")
        cfg.impute_a = to_double(value);
    else if (key == "impute.history_weeks")
        cfg.impute_history_weeks = to_int(value);
    else if (key == "outlier.multiplier")
        cfg.outlier_multiplier = to_double(value);
    else if (key == "seed") {
        try {
            cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
        } catch (...) {
            throw ConfigError("bad integer for seed: '" + value + "'");
        }
    }
    else if (key == "out.dir")
        cfg.out_dir = value;
    else if (key == "train.max_epochs")
        cfg.max_epochs = to_int(value);
    else if (key == "train.patience")
        cfg.patience = to_int(value);
    else if (key == "activation")
        cfg.activation = value;
    else if (key == "search.preset")
        cfg.search_preset = value;
    else if (key == "window.stride")
        cfg.stride = to_int(value);
    else
        throw ConfigError("unknown config key '" + key + "'");
}

inline PipelineConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    PipelineConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + " is not 'key = value': '" + t + "'");
        std::string key = detail::trim(t.substr(0, eq));
        std::string value = detail::trim(t.substr(eq + 1));
        set_config_key(cfg, key, value);
    }
    return cfg;
}

// The desk preset: 10 HPO trials, 5-member ensembles, the small search
// space, and a capped epoch budget, sized so a full synthetic pipeline run
// finishes in minutes on one core.
inline void apply_desk_scale(PipelineConfig& cfg) {
    cfg.hpo_trials = 10;
    cfg.ensemble_size = 5;
    cfg.search_preset = "desk";
    cfg.max_epochs = 150;
    cfg.cluster_k = 2;  // the synthetic default has two profile families
}

inline void write_resolved_config(const PipelineConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    char buf[64];
    out << "data.manifest = " << cfg.manifest << "\n";
    out << "data.families = " << cfg.syn_families << "\n";
    out << "data.countries_per_family = " << cfg.syn_countries_per_family << "\n";
    out << "data.years = " << cfg.syn_years << "\n";
    out << "split.train_end = " << cfg.train_end << "\n";
    out << "split.val_end = " << cfg.val_end << "\n";
    out << "split.test_end = " << cfg.test_end << "\n";
    out << "cluster.k = " << cfg.cluster_k << "\n";
    out << "hpo.trials = " << cfg.hpo_trials << "\n";
    out << "ensemble.size = " << cfg.ensemble_size << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.impute_a);
    out << "impute.a = " << buf << "\n";
    out << "impute.history_weeks = " << cfg.impute_history_weeks << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.outlier_multiplier);
    out << "outlier.multiplier = " << buf << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "out.dir = " << cfg.out_dir << "\n";
    out << "train.max_epochs = " << cfg.max_epochs << "\n";
    out << "train.patience = " << cfg.patience << "\n";
    out << "activation = " << cfg.activation << "\n";
    out << "search.preset = " << cfg.search_preset << "\n";
    out << "window.stride = " << cfg.stride << "\n";
}

struct IngestSummary {
    std::string country;
    std::size_t duplicates_dropped = 0;
    std::size_t outliers_removed = 0;
    std::size_t imputed = 0;
};

// Loads the configured dataset: either parse + wrangle every manifest
// country, or generate the synthetic families. Splits come from the config
// when given; synthetic data carries its own defaults.
inline Dataset load_dataset(const PipelineConfig& cfg, std::vector<IngestSummary>* summaries = nullptr,
                            std::map<std::string, WrangleLog>* logs = nullptr) {
    Dataset ds;
    if (cfg.manifest.empty()) {
        std::vector<ProfileFamily> fams;
        for (int i = 0; i < cfg.syn_families; ++i) fams.push_back(make_family(i));
        ds = synthesize_dataset(cfg.seed, fams, cfg.syn_countries_per_family, cfg.syn_years);
        if (summaries)
            for (const auto& kv : ds.series) summaries->push_back({kv.first, 0, 0, 0});
    } else {
        auto entries = read_manifest(cfg.manifest);
        ImputationParams params{cfg.impute_a, cfg.impute_history_weeks};
        for (const auto& entry : entries) {
            ParsedLoad parsed = parse_load_csv(entry.csv_path, entry.meta);
            WrangledCountry wc = wrangle_country(parsed.rows, entry.meta, cfg.outlier_multiplier, params);
            if (summaries)
                summaries->push_back({entry.meta.code, wc.duplicates_dropped, wc.outliers.removed.size(),
                                      wc.imputed});
            if (logs) (*logs)[entry.meta.code] = std::move(wc.log);
            ds.meta[entry.meta.code] = entry.meta;
            ds.series[entry.meta.code] = std::move(wc.series);
        }
        if (cfg.train_end.empty() || cfg.val_end.empty() || cfg.test_end.empty())
            throw ConfigError("split.train_end/val_end/test_end are required for manifest datasets");
    }
    if (!cfg.train_end.empty()) ds.splits.train_end = parse_timestamp(cfg.train_end).hour;
    if (!cfg.val_end.empty()) ds.splits.val_end = parse_timestamp(cfg.val_end).hour;
    if (!cfg.test_end.empty()) ds.splits.test_end = parse_timestamp(cfg.test_end).hour;
    validate_splits(ds.splits);
    return ds;
}

inline ExperimentOptions make_options(const PipelineConfig& cfg) {
    ExperimentOptions opt;
    if (cfg.search_preset == "paper")
        opt.space = SearchSpace::defaults();
    else if (cfg.search_preset == "desk")
        opt.space = SearchSpace::desk_scale();
    else
        throw ConfigError("unknown search.preset '" + cfg.search_preset + "' (paper|desk)");
    opt.hpo_trials = cfg.hpo_trials;
    opt.ensemble_size = cfg.ensemble_size;
    opt.act = activation_from_name(cfg.activation);
    opt.train_cfg.max_epochs = cfg.max_epochs;
    opt.train_cfg.patience = cfg.patience;
    return opt;
}

namespace detail {

inline void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw DataError("cannot create directory '" + dir + "': " + ec.message());
}

inline void write_timing(const std::string& path, const std::vector<std::pair<std::string, double>>& rows) {
    std::ofstream out(path);
    char buf[64];
    out << "phase,minutes\n";
    for (const auto& [phase, seconds] : rows) {
        std::snprintf(buf, sizeof buf, "%.3f", seconds / 60.0);
        out << phase << ',' << buf << '\n';
    }
}

}  // namespace detail

inline void stage_ingest(const PipelineConfig& cfg) {
    std::string dir = cfg.out_dir + "/ingest";
    detail::ensure_dir(dir);
    std::vector<IngestSummary> summaries;
    std::map<std::string, WrangleLog> logs;
    Dataset ds = load_dataset(cfg, &summaries, &logs);

    std::vector<ManifestEntry> cleaned;
    for (const auto& [code, series] : ds.series) {
        std::string csv = dir + "/" + code + ".csv";
        write_load_csv(series, csv);
        ManifestEntry e;
        e.meta = ds.meta.at(code);
        e.csv_path = code + ".csv";
        cleaned.push_back(e);
        auto lit = logs.find(code);
        if (lit != logs.end()) write_wrangle_log(lit->second, dir + "/" + code + "_wrangle_log.csv");
    }
    write_manifest(cleaned, dir + "/manifest.csv");

    std::ofstream sum(dir + "/summary.csv");
    sum << "country,duplicates_dropped,outliers_removed,imputed\n";
    for (const auto& s : summaries)
        sum << s.country << ',' << s.duplicates_dropped << ',' << s.outliers_removed << ',' << s.imputed
            << '\n';
}

inline void stage_profile(const PipelineConfig& cfg) {
    std::string dir = cfg.out_dir + "/profiles";
    detail::ensure_dir(dir);
    Dataset ds = load_dataset(cfg);

    std::ofstream daily(dir + "/daily.csv"), weekly(dir + "/weekly.csv"), yearly(dir + "/yearly.csv");
    std::ofstream vectors(dir + "/vectors.csv");
    daily << "country,hour,mean_mw\n";
    weekly << "country,weekday,mean_mw\n";
    yearly << "country,month,mean_mw\n";
    vectors << "country,component,value\n";
    char buf[64];
    for (const auto& [code, series] : ds.series) {
        LoadProfiles p = compute_profiles(series);
        for (int h = 0; h < 24; ++h) {
            std::snprintf(buf, sizeof buf, "%.6f", p.daily[h]);
            daily << code << ',' << h << ',' << buf << '\n';
        }
        for (int d = 0; d < 7; ++d) {
            std::snprintf(buf, sizeof buf, "%.6f", p.weekly[d]);
            weekly << code << ',' << d << ',' << buf << '\n';
        }
        for (int m = 0; m < 12; ++m) {
            std::snprintf(buf, sizeof buf, "%.6f", p.yearly[m]);
            yearly << code << ',' << m + 1 << ',' << buf << '\n';
        }
        ProfileVector v = build_profile_vector(p, code);
        for (std::size_t c = 0; c < v.components.size(); ++c) {
            std::snprintf(buf, sizeof buf, "%.12g", v.components[c]);
            vectors << code << ',' << c << ',' << buf << '\n';
        }
    }
}

inline void stage_cluster(const PipelineConfig& cfg) {
    std::string dir = cfg.out_dir + "/cluster";
    detail::ensure_dir(dir);
    Dataset ds = load_dataset(cfg);
    std::vector<ProfileVector> vectors;
    for (const auto& [code, series] : ds.series)
        vectors.push_back(build_profile_vector(compute_profiles(series), code));
    Dendrogram dg = ward_dendrogram(vectors);
    write_dendrogram_csv(dg, dir + "/dendrogram.csv");
    write_dendrogram_svg(dg, dir + "/dendrogram.svg");
    ClusterAssignment ca = cut_clusters(dg, cfg.cluster_k);
    write_assignment_csv(ca, dir + "/assignment.csv");
}

inline void stage_tune(const PipelineConfig& cfg, const std::string& setup_str, const std::string& target) {
    std::string dir = cfg.out_dir + "/tune";
    detail::ensure_dir(dir);
    Dataset ds = load_dataset(cfg);
    ExperimentData data(ds, 24, cfg.stride);
    ExperimentOptions opt = make_options(cfg);
    SetupKind setup = setup_from_name(setup_str);
    if (setup == SetupKind::SNaive168) throw ConfigError("the snaive setup has no hyperparameters to tune");

    const ClusterAssignment* clusters = nullptr;
    ClusterAssignment loaded;
    if (setup == SetupKind::CbO) {
        loaded = read_assignment_csv(cfg.out_dir + "/cluster/assignment.csv");
        clusters = &loaded;
    }
    std::vector<std::string> sources = build_source_set(setup, target, data.country_codes(), clusters);

    TrialEvaluator ev = [&](const Hyperparameters& hp, std::uint64_t trial_seed, PruneProbe& probe) {
        if (sources.empty()) {
            const WindowSplit& ws = data.windows(target, hp.lookback);
            return detail::evaluate_trial(hp, trial_seed, probe, ws.train, ws.val, data, opt);
        }
        WindowSet train_ws = data.pooled(sources, hp.lookback, 0);
        WindowSet val_ws = data.pooled(sources, hp.lookback, 1);
        return detail::evaluate_trial(hp, trial_seed, probe, train_ws, val_ws, data, opt);
    };
    StudyResult study = run_study(ev, opt.space, opt.hpo_trials,
                                  derive_seed(cfg.seed, "tune:" + setup_str + ":" + target, 0));

    std::string stem = dir + "/" + setup_str + "_" + target;
    write_study_csv(study.state, stem + "_study.csv");
    std::ofstream best(stem + "_best.txt");
    char buf[64];
    best << "num_layers = " << study.best.hp.num_layers << "\n";
    best << "layer_sizes =";
    for (int s : study.best.hp.layer_sizes) best << ' ' << s;
    best << "\n";
    best << "lookback = " << study.best.hp.lookback << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", study.best.hp.learning_rate);
    best << "learning_rate = " << buf << "\n";
    best << "batch_size = " << study.best.hp.batch_size << "\n";
    std::snprintf(buf, sizeof buf, "%.6f", study.best.objective);
    best << "objective_mape = " << buf << "\n";
}

namespace detail {

inline void write_result_txt(const ExperimentResult& res, const std::string& path) {
    std::ofstream out(path);
    char buf[64];
    out << "setup = " << setup_name(res.setup) << "\n";
    out << "target = " << res.target << "\n";
    std::snprintf(buf, sizeof buf, "%.10g", res.test_mape);
    out << "test_mape = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.10g", res.mean_epochs);
    out << "mean_epochs = " << buf << "\n";
    if (res.setup != SetupKind::SNaive168) {
        out << "num_layers = " << res.hp.num_layers << "\n";
        out << "layer_sizes =";
        for (int s : res.hp.layer_sizes) out << ' ' << s;
        out << "\n";
        out << "lookback = " << res.hp.lookback << "\n";
        std::snprintf(buf, sizeof buf, "%.17g", res.hp.learning_rate);
        out << "learning_rate = " << buf << "\n";
        out << "batch_size = " << res.hp.batch_size << "\n";
    }
}

}  // namespace detail

inline void run_one_experiment(ExperimentData& data, SetupKind setup, const std::string& target,
                               const ClusterAssignment* clusters, const ExperimentOptions& opt,
                               const PipelineConfig& cfg) {
    ExperimentResult res = run_experiment(data, setup, target, clusters, opt, cfg.seed);
    std::string dir = cfg.out_dir + "/experiments/" + std::string(setup_name(setup)) + "_" + target;
    detail::ensure_dir(dir);
    write_forecast_csv(res, dir + "/forecast.csv");
    detail::write_result_txt(res, dir + "/result.txt");
    if (res.has_study) write_study_csv(res.study, dir + "/study.csv");
    if (res.has_source_model) save_model(res.source_model, dir + "/source_model.txt");
    for (std::size_t i = 0; i < res.members.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof name, "/member_%02zu.txt", i);
        save_model(res.members[i], dir + name);
    }
    std::vector<std::pair<std::string, double>> timing;
    if (setup == SetupKind::AbO || setup == SetupKind::CbO) {
        timing.push_back({"source", res.source_seconds});
        timing.push_back({"target", res.target_seconds});
    } else if (setup == SetupKind::Baseline) {
        timing.push_back({"baseline", res.source_seconds + res.target_seconds});
    }
    if (!timing.empty()) detail::write_timing(dir + "/timing.csv", timing);
}

inline void stage_experiment(const PipelineConfig& cfg, const std::string& setup_filter,
                             const std::string& target_filter) {
    detail::ensure_dir(cfg.out_dir + "/experiments");
    Dataset ds = load_dataset(cfg);
    ExperimentData data(ds, 24, cfg.stride);
    ExperimentOptions opt = make_options(cfg);

    std::vector<std::string> setups;
    if (setup_filter == "all")
        setups = {"snaive", "baseline", "abo", "cbo"};
    else
        setups = {setup_filter};
    std::vector<std::string> targets;
    if (target_filter == "all")
        targets = data.country_codes();
    else
        targets = {target_filter};

    const ClusterAssignment* clusters = nullptr;
    ClusterAssignment loaded;
    bool needs_clusters = false;
    for (const auto& s : setups)
        if (setup_from_name(s) == SetupKind::CbO) needs_clusters = true;
    if (needs_clusters) {
        loaded = read_assignment_csv(cfg.out_dir + "/cluster/assignment.csv");
        clusters = &loaded;
    }

    for (const auto& target : targets)
        for (const auto& s : setups)
            run_one_experiment(data, setup_from_name(s), target, clusters, opt, cfg);
}

namespace detail {

inline std::map<std::string, std::string> read_kv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return kv;
}

}  // namespace detail

inline void stage_report(const PipelineConfig& cfg) {
    std::string exp_dir = cfg.out_dir + "/experiments";
    if (!std::filesystem::is_directory(exp_dir))
        throw DataError("missing experiments directory '" + exp_dir + "'; run the experiment stage first");

    ReportRows rows;
    std::vector<std::filesystem::path> result_files;
    for (const auto& entry : std::filesystem::directory_iterator(exp_dir)) {
        auto rt = entry.path() / "result.txt";
        if (std::filesystem::is_regular_file(rt)) result_files.push_back(rt);
    }
    std::sort(result_files.begin(), result_files.end());
    for (const auto& rt : result_files) {
        auto kv = detail::read_kv_file(rt.string());
        if (!kv.count("setup") || !kv.count("target") || !kv.count("test_mape"))
            throw DataError("malformed result file '" + rt.string() + "'");
        rows[kv["target"]][kv["setup"]] = std::stod(kv["test_mape"]);
    }
    if (rows.empty()) throw DataError("no experiment results under '" + exp_dir + "'");
    for (const auto& [country, setups] : rows)
        if (!setups.count("baseline"))
            throw DataError("missing experiment '" + exp_dir + "/baseline_" + country +
                            "'; run the baseline setup for " + country);

    std::string dir = cfg.out_dir + "/report";
    detail::ensure_dir(dir);
    ClusterAssignment ca = read_assignment_csv(cfg.out_dir + "/cluster/assignment.csv");
    write_country_table(rows, ca, dir + "/country_table.csv");
    write_cluster_table(rows, ca, dir + "/cluster_table.csv");

    std::vector<std::string> labels;
    std::vector<std::pair<std::string, std::vector<double>>> series;
    for (const char* setup : {"snaive", "baseline", "abo", "cbo"}) {
        bool any = false;
        for (const auto& [country, setups] : rows)
            if (setups.count(setup)) any = true;
        if (any) series.push_back({setup, {}});
    }
    for (const auto& [country, setups] : rows) {
        labels.push_back(country);
        for (auto& [name, vals] : series) {
            auto it = setups.find(name);
            vals.push_back(it == setups.end() ? 0.0 : it->second);
        }
    }
    write_bar_chart_svg(labels, series, "Test MAPE (%) per country", dir + "/mape_bars.svg");
}

}  // namespace loadcast
