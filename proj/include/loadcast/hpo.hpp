#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/mlp.hpp"
#include "loadcast/rng.hpp"

namespace loadcast {

// Hyperparameter search: tree-structured Parzen estimator over a mixed
// discrete/continuous space, with successive-halving pruning at fixed epoch
// milestones.

struct SearchSpace {
    std::vector<int> num_layers_choices{2, 3, 4, 5, 6};
    std::vector<int> layer_size_choices{128, 256, 512, 1024, 2048};
    std::vector<int> lookback_choices{168, 336, 504, 672};
    std::vector<int> batch_choices{256, 512, 1024};
    double lr_min = 1e-5;
    double lr_max = 1e-4;  // searched on log scale
    int horizon = 24;

    static SearchSpace defaults() { return SearchSpace{}; }

    // Small space for minute-scale smoke runs; same structure, tiny networks.
    static SearchSpace desk_scale() {
        SearchSpace s;
        s.num_layers_choices = {2, 3};
        s.layer_size_choices = {32, 64};
        s.lookback_choices = {168};
        s.batch_choices = {64, 128};
        s.lr_min = 1e-3;
        s.lr_max = 1e-2;
        return s;
    }
};

inline void validate_space(const SearchSpace& s) {
    if (s.num_layers_choices.empty() || s.layer_size_choices.empty() || s.lookback_choices.empty() ||
        s.batch_choices.empty())
        throw ConfigError("search space has an empty dimension");
    if (!(s.lr_min > 0 && s.lr_max >= s.lr_min)) throw ConfigError("bad learning-rate range");
    for (int v : s.num_layers_choices)
        if (v < 1) throw ConfigError("num_layers choices must be >= 1");
}

enum class TrialStatus { Running, Pruned, Complete };

inline const char* trial_status_name(TrialStatus st) {
    switch (st) {
        case TrialStatus::Running: return "running";
        case TrialStatus::Pruned: return "pruned";
        case TrialStatus::Complete: return "complete";
    }
    return "running";
}

struct Trial {
    int id = 0;
    Hyperparameters hp;
    TrialStatus status = TrialStatus::Running;
    double objective = std::numeric_limits<double>::quiet_NaN();  // validation MAPE %
    std::vector<std::pair<int, double>> rung_losses;              // (rung epoch, val loss)
};

struct StudyState {
    std::vector<Trial> trials;
    double gamma = 0.25;    // good/bad split quantile
    int n_candidates = 24;  // candidates scored per suggestion
    int n_startup = 10;     // uniform trials before TPE kicks in
    std::vector<int> rung_epochs{5, 15, 45};
    int eta = 3;  // successive-halving reduction factor
    Rng rng{0};
};

namespace detail {

inline Hyperparameters uniform_sample(const SearchSpace& space, Rng& rng) {
    Hyperparameters hp;
    hp.num_layers = space.num_layers_choices[rng.uniform_index(space.num_layers_choices.size())];
    hp.layer_sizes.clear();
    for (int i = 0; i < hp.num_layers; ++i)
        hp.layer_sizes.push_back(space.layer_size_choices[rng.uniform_index(space.layer_size_choices.size())]);
    hp.lookback = space.lookback_choices[rng.uniform_index(space.lookback_choices.size())];
    hp.batch_size = space.batch_choices[rng.uniform_index(space.batch_choices.size())];
    // exp(log(x)) can land one ulp outside the range; clamp to keep the
    // published bounds exact
    hp.learning_rate =
        std::clamp(std::exp(rng.uniform(std::log(space.lr_min), std::log(space.lr_max))),
                   space.lr_min, space.lr_max);
    hp.horizon = space.horizon;
    return hp;
}

// Laplace-smoothed categorical frequencies over the set of allowed choices.
struct CategoricalModel {
    std::vector<int> choices;
    std::vector<double> probs;

    static CategoricalModel fit(const std::vector<int>& choices, const std::vector<int>& observed) {
        CategoricalModel m;
        m.choices = choices;
        m.probs.assign(choices.size(), 0.0);
        const double alpha = 1.0;
        double denom = static_cast<double>(observed.size()) + alpha * choices.size();
        for (std::size_t i = 0; i < choices.size(); ++i) {
            double cnt = 0;
            for (int v : observed)
                if (v == choices[i]) ++cnt;
            m.probs[i] = (cnt + alpha) / denom;
        }
        return m;
    }

    int sample(Rng& rng) const {
        double u = rng.uniform01();
        double acc = 0.0;
        for (std::size_t i = 0; i < choices.size(); ++i) {
            acc += probs[i];
            if (u < acc) return choices[i];
        }
        return choices.back();
    }

    double prob_of(int value) const {
        for (std::size_t i = 0; i < choices.size(); ++i)
            if (choices[i] == value) return probs[i];
        return 1.0 / static_cast<double>(choices.size());
    }
};

// Gaussian KDE with a Scott-style bandwidth, used on log learning rates.
// Degenerate samples (fewer than 2 points or zero spread) fall back to a
// uniform density over the search range.
struct KdeModel {
    std::vector<double> points;
    double bandwidth = 0.0;
    double lo = 0.0, hi = 1.0;  // log-range, used for the uniform fallback

    static KdeModel fit(const std::vector<double>& points, double lo, double hi) {
        KdeModel m;
        m.points = points;
        m.lo = lo;
        m.hi = hi;
        if (points.size() >= 2) {
            double mean = 0;
            for (double p : points) mean += p;
            mean /= static_cast<double>(points.size());
            double ss = 0;
            for (double p : points) ss += (p - mean) * (p - mean);
            double sd = std::sqrt(ss / static_cast<double>(points.size()));
            m.bandwidth = 1.06 * sd * std::pow(static_cast<double>(points.size()), -0.2);
        }
        return m;
    }

    bool degenerate() const { return points.size() < 2 || bandwidth <= 0.0; }

    double sample(Rng& rng) const {
        if (degenerate()) return rng.uniform(lo, hi);
        std::size_t i = rng.uniform_index(points.size());
        double x = rng.normal(points[i], bandwidth);
        return std::clamp(x, lo, hi);
    }

    double log_density(double x) const {
        if (degenerate()) return -std::log(hi - lo);
        double acc = 0.0;
        const double norm = 1.0 / (bandwidth * std::sqrt(2.0 * 3.141592653589793238462643383279));
        for (double p : points) {
            double z = (x - p) / bandwidth;
            acc += norm * std::exp(-0.5 * z * z);
        }
        return std::log(acc / static_cast<double>(points.size()) + 1e-300);
    }
};

}  // namespace detail

// One TPE suggestion. Below n_startup completed trials the draw is uniform;
// afterwards completed trials are split at the gamma-quantile of the
// objective, each dimension is modeled separately for the good and bad
// sets, n_candidates are drawn from the good model and the candidate with
// the highest sum of log density ratios wins. Per-layer size dimensions are
// conditional: only trials deep enough to have that layer inform it.
inline Hyperparameters tpe_suggest(StudyState& state, const SearchSpace& space) {
    validate_space(space);
    std::vector<const Trial*> completed;
    for (const auto& t : state.trials)
        if (t.status == TrialStatus::Complete && std::isfinite(t.objective)) completed.push_back(&t);

    if (static_cast<int>(completed.size()) < state.n_startup)
        return detail::uniform_sample(space, state.rng);

    std::sort(completed.begin(), completed.end(),
              [](const Trial* a, const Trial* b) { return a->objective < b->objective; });
    auto n = completed.size();
    auto n_good = static_cast<std::size_t>(
        std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(state.gamma * static_cast<double>(n)))));
    if (n_good >= n) n_good = n - 1;
    std::vector<const Trial*> good(completed.begin(), completed.begin() + n_good);
    std::vector<const Trial*> bad(completed.begin() + n_good, completed.end());

    const double log_lo = std::log(space.lr_min), log_hi = std::log(space.lr_max);
    auto log_lrs = [&](const std::vector<const Trial*>& set) {
        std::vector<double> xs;
        for (const Trial* t : set) xs.push_back(std::log(t->hp.learning_rate));
        return xs;
    };
    auto lr_good = detail::KdeModel::fit(log_lrs(good), log_lo, log_hi);
    auto lr_bad = detail::KdeModel::fit(log_lrs(bad), log_lo, log_hi);

    auto cat_values = [](const std::vector<const Trial*>& set, auto&& get) {
        std::vector<int> vs;
        for (const Trial* t : set) vs.push_back(get(*t));
        return vs;
    };
    auto layers_good = detail::CategoricalModel::fit(
        space.num_layers_choices, cat_values(good, [](const Trial& t) { return t.hp.num_layers; }));
    auto layers_bad = detail::CategoricalModel::fit(
        space.num_layers_choices, cat_values(bad, [](const Trial& t) { return t.hp.num_layers; }));
    auto lookback_good = detail::CategoricalModel::fit(
        space.lookback_choices, cat_values(good, [](const Trial& t) { return t.hp.lookback; }));
    auto lookback_bad = detail::CategoricalModel::fit(
        space.lookback_choices, cat_values(bad, [](const Trial& t) { return t.hp.lookback; }));
    auto batch_good = detail::CategoricalModel::fit(
        space.batch_choices, cat_values(good, [](const Trial& t) { return t.hp.batch_size; }));
    auto batch_bad = detail::CategoricalModel::fit(
        space.batch_choices, cat_values(bad, [](const Trial& t) { return t.hp.batch_size; }));

    int max_layers = *std::max_element(space.num_layers_choices.begin(), space.num_layers_choices.end());
    auto size_values = [&](const std::vector<const Trial*>& set, int layer) {
        std::vector<int> vs;
        for (const Trial* t : set)
            if (t->hp.num_layers > layer) vs.push_back(t->hp.layer_sizes[layer]);
        return vs;
    };
    std::vector<detail::CategoricalModel> size_good, size_bad;
    for (int layer = 0; layer < max_layers; ++layer) {
        size_good.push_back(detail::CategoricalModel::fit(space.layer_size_choices, size_values(good, layer)));
        size_bad.push_back(detail::CategoricalModel::fit(space.layer_size_choices, size_values(bad, layer)));
    }

    Hyperparameters best_hp;
    double best_score = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < state.n_candidates; ++c) {
        Hyperparameters hp;
        hp.horizon = space.horizon;
        hp.num_layers = layers_good.sample(state.rng);
        hp.layer_sizes.clear();
        for (int layer = 0; layer < hp.num_layers; ++layer)
            hp.layer_sizes.push_back(size_good[layer].sample(state.rng));
        hp.lookback = lookback_good.sample(state.rng);
        hp.batch_size = batch_good.sample(state.rng);
        double log_lr = lr_good.sample(state.rng);
        hp.learning_rate = std::clamp(std::exp(log_lr), space.lr_min, space.lr_max);

        double score = 0.0;
        score += std::log(layers_good.prob_of(hp.num_layers)) - std::log(layers_bad.prob_of(hp.num_layers));
        for (int layer = 0; layer < hp.num_layers; ++layer)
            score += std::log(size_good[layer].prob_of(hp.layer_sizes[layer])) -
                     std::log(size_bad[layer].prob_of(hp.layer_sizes[layer]));
        score += std::log(lookback_good.prob_of(hp.lookback)) - std::log(lookback_bad.prob_of(hp.lookback));
        score += std::log(batch_good.prob_of(hp.batch_size)) - std::log(batch_bad.prob_of(hp.batch_size));
        score += lr_good.log_density(log_lr) - lr_bad.log_density(log_lr);

        if (score > best_score) {
            best_score = score;
            best_hp = hp;
        }
    }
    return best_hp;
}

// Successive halving: at a rung, keep the best floor(n/eta) reporters (at
// least one); with fewer than eta reporters nobody is pruned. Ties at the
// cut survive.
inline bool should_prune(const Trial& trial, const StudyState& state, int rung_epoch) {
    double own = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [epoch, loss] : trial.rung_losses)
        if (epoch == rung_epoch) own = loss;
    if (!std::isfinite(own)) return false;

    std::vector<double> losses;
    for (const auto& t : state.trials)
        for (const auto& [epoch, loss] : t.rung_losses)
            if (epoch == rung_epoch) losses.push_back(loss);
    if (static_cast<int>(losses.size()) < state.eta) return false;

    std::sort(losses.begin(), losses.end());
    auto keep = std::max<std::size_t>(1, losses.size() / static_cast<std::size_t>(state.eta));
    double threshold = losses[keep - 1];
    return own > threshold;
}

// Handed to the evaluator so it can report validation losses at rung epochs
// and learn whether to stop.
struct PruneProbe {
    std::function<bool(int, double)> report;  // (epoch, val_loss) -> stop?
};

using TrialEvaluator = std::function<double(const Hyperparameters&, std::uint64_t, PruneProbe&)>;

struct StudyResult {
    Trial best;
    StudyState state;
};

// Sequential, deterministic study loop: suggest, evaluate, record. The
// evaluator gets a per-trial derived seed; trials the probe stops (or that
// diverge) are recorded as pruned.
inline StudyResult run_study(const TrialEvaluator& evaluate, const SearchSpace& space, int n_trials,
                             std::uint64_t seed, StudyState state = StudyState{}) {
    if (n_trials < 1) throw ConfigError("need at least one trial");
    validate_space(space);
    state.rng = Rng(derive_seed(seed, "tpe", 0));

    for (int id = 0; id < n_trials; ++id) {
        Trial trial;
        trial.id = id;
        trial.hp = tpe_suggest(state, space);
        state.trials.push_back(trial);
        Trial& rec = state.trials.back();

        bool stopped = false;
        PruneProbe probe;
        probe.report = [&](int epoch, double val_loss) {
            bool is_rung = std::find(state.rung_epochs.begin(), state.rung_epochs.end(), epoch) !=
                           state.rung_epochs.end();
            if (!is_rung) return false;
            rec.rung_losses.push_back({epoch, val_loss});
            if (should_prune(rec, state, epoch)) {
                stopped = true;
                return true;
            }
            return false;
        };

        try {
            double objective = evaluate(rec.hp, derive_seed(seed, "trial", static_cast<std::uint64_t>(id)),
                                        probe);
            if (stopped || !std::isfinite(objective)) {
                rec.status = TrialStatus::Pruned;
            } else {
                rec.status = TrialStatus::Complete;
                rec.objective = objective;
            }
        } catch (const TrainingError&) {
            rec.status = TrialStatus::Pruned;
        }
    }

    const Trial* best = nullptr;
    for (const auto& t : state.trials)
        if (t.status == TrialStatus::Complete && (!best || t.objective < best->objective)) best = &t;
    if (!best) throw TrainingError("every trial was pruned or diverged; no completed trial to pick");
    return {*best, std::move(state)};
}

inline void write_study_csv(const StudyState& state, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "trial_id,status,num_layers,layer_sizes,lookback,lr,batch,objective_mape,rungs\n";
    char buf[64];
    for (const auto& t : state.trials) {
        out << t.id << ',' << trial_status_name(t.status) << ',' << t.hp.num_layers << ',';
        for (std::size_t i = 0; i < t.hp.layer_sizes.size(); ++i)
            out << (i ? "|" : "") << t.hp.layer_sizes[i];
        std::snprintf(buf, sizeof buf, "%.10g", t.hp.learning_rate);
        out << ',' << t.hp.lookback << ',' << buf << ',' << t.hp.batch_size << ',';
        if (std::isfinite(t.objective)) {
            std::snprintf(buf, sizeof buf, "%.6f", t.objective);
            out << buf;
        }
        out << ',';
        for (std::size_t i = 0; i < t.rung_losses.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%d:%.6f", t.rung_losses[i].first, t.rung_losses[i].second);
            out << (i ? "|" : "") << buf;
        }
        out << '\n';
    }
}

}  // namespace loadcast
