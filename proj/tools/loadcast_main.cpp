#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <iostream>
#include <string>

#include "loadcast/loadcast.hpp"

namespace {

void write_stage_timing(const std::string& out_dir, const std::string& stage, double seconds) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", seconds / 60.0);
    std::ofstream out(out_dir + "/timing_" + stage + ".csv");
    out << "phase,minutes\n" << stage << ',' << buf << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Day-ahead electricity load forecasting: wrangling, clustering, transfer training"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;
    bool desk_scale = false;
    std::uint64_t seed_override = 0;
    app.add_option("-c,--config", config_path, "config file (key = value lines)");
    app.add_flag("--desk-scale", desk_scale,
                 "minute-scale preset: 10 HPO trials, 5-member ensembles, small search space");
    app.add_option("--out", out_override, "output directory (overrides out.dir)");
    auto* seed_opt = app.add_option("--seed", seed_override, "master seed (overrides config)");

    auto* cmd_ingest = app.add_subcommand("ingest", "parse and wrangle the dataset, emit cleaned CSVs");
    auto* cmd_profile = app.add_subcommand("profile", "emit daily/weekly/yearly profile CSVs");
    auto* cmd_cluster = app.add_subcommand("cluster", "build the dendrogram and cluster assignment");
    int k_override = 0;
    auto* k_opt = cmd_cluster->add_option("--k", k_override, "cluster count (overrides cluster.k)");

    auto* cmd_tune = app.add_subcommand("tune", "run a hyperparameter study for one scope");
    std::string tune_setup = "baseline", tune_target;
    cmd_tune->add_option("--setup", tune_setup, "baseline|abo|cbo");
    cmd_tune->add_option("--target", tune_target, "target country code")->required();

    auto* cmd_exp = app.add_subcommand("experiment", "run forecasting experiments");
    std::string exp_setup = "all", exp_target = "all";
    cmd_exp->add_option("--setup", exp_setup, "snaive|baseline|abo|cbo|all");
    cmd_exp->add_option("--target", exp_target, "country code or 'all'");

    auto* cmd_report = app.add_subcommand("report", "aggregate per-country and per-cluster tables");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        loadcast::PipelineConfig cfg;
        if (!config_path.empty()) cfg = loadcast::parse_config(config_path);
        if (desk_scale) loadcast::apply_desk_scale(cfg);
        if (!out_override.empty()) cfg.out_dir = out_override;
        if (seed_opt->count() > 0) cfg.seed = seed_override;
        if (k_opt->count() > 0) cfg.cluster_k = k_override;

        loadcast::detail::ensure_dir(cfg.out_dir);
        loadcast::write_resolved_config(cfg, cfg.out_dir + "/config_resolved.txt");

        auto t0 = std::chrono::steady_clock::now();
        std::string stage;
        if (cmd_ingest->parsed()) {
            stage = "ingest";
            loadcast::stage_ingest(cfg);
        } else if (cmd_profile->parsed()) {
            stage = "profile";
            loadcast::stage_profile(cfg);
        } else if (cmd_cluster->parsed()) {
            stage = "cluster";
            loadcast::stage_cluster(cfg);
        } else if (cmd_tune->parsed()) {
            stage = "tune";
            loadcast::stage_tune(cfg, tune_setup, tune_target);
        } else if (cmd_exp->parsed()) {
            stage = "experiment";
            loadcast::stage_experiment(cfg, exp_setup, exp_target);
        } else if (cmd_report->parsed()) {
            stage = "report";
            loadcast::stage_report(cfg);
        }
        double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_stage_timing(cfg.out_dir, stage, seconds);
        return 0;
    } catch (const loadcast::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const loadcast::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 3;
    } catch (const loadcast::TrainingError& e) {
        std::cerr << "training error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
