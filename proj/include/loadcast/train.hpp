#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/mlp.hpp"
#include "loadcast/rng.hpp"
#include "loadcast/window.hpp"

namespace loadcast {

struct TrainConfig {
    int max_epochs = 200;
    int patience = 10;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t seed = 0;
};

// Gradients mirror the model's layer shapes.
struct ParamGrads {
    std::vector<std::vector<double>> w;
    std::vector<std::vector<double>> b;
    double loss = 0.0;
};

// Backprop over one mini-batch; loss is the mean squared error over all
// horizon outputs of every sample in `batch`.
inline ParamGrads compute_gradients(const MLPModel& m, const WindowSet& ws,
                                    const std::vector<std::size_t>& batch) {
    if (batch.empty()) throw TrainingError("empty batch");
    const std::size_t L = m.layers.size();
    ParamGrads g;
    g.w.resize(L);
    g.b.resize(L);
    for (std::size_t li = 0; li < L; ++li) {
        g.w[li].assign(m.layers[li].w.size(), 0.0);
        g.b[li].assign(m.layers[li].b.size(), 0.0);
    }

    const double denom = static_cast<double>(batch.size()) * m.hp.horizon;
    double loss = 0.0;
    ForwardCache cache;
    std::vector<std::vector<double>> delta(L);

    for (std::size_t s : batch) {
        forward_cached(m, ws.inputs[s], cache);
        const std::vector<double>& y = ws.targets[s];
        const std::vector<double>& yhat = cache.a[L];

        // Output layer: affine, dL/dz = 2(yhat - y)/denom.
        delta[L - 1].assign(m.layers[L - 1].out_dim, 0.0);
        for (int o = 0; o < m.layers[L - 1].out_dim; ++o) {
            double diff = yhat[o] - y[o];
            loss += diff * diff;
            delta[L - 1][o] = 2.0 * diff / denom;
        }
        for (std::size_t li = L - 1; li-- > 0;) {
            const DenseLayer& up = m.layers[li + 1];
            delta[li].assign(m.layers[li].out_dim, 0.0);
            for (int i = 0; i < up.in_dim; ++i) {
                double acc = 0.0;
                for (int o = 0; o < up.out_dim; ++o)
                    acc += up.w[static_cast<std::size_t>(o) * up.in_dim + i] * delta[li + 1][o];
                delta[li][i] =
                    acc * activate_grad(m.hidden_activation, cache.z[li][i], cache.a[li + 1][i]);
            }
        }
        for (std::size_t li = 0; li < L; ++li) {
            const DenseLayer& dl = m.layers[li];
            const std::vector<double>& x = cache.a[li];
            for (int o = 0; o < dl.out_dim; ++o) {
                double d = delta[li][o];
                if (d == 0.0) continue;
                double* wrow = g.w[li].data() + static_cast<std::size_t>(o) * dl.in_dim;
                for (int i = 0; i < dl.in_dim; ++i) wrow[i] += d * x[i];
                g.b[li][o] += d;
            }
        }
    }
    g.loss = loss / denom;
    if (!std::isfinite(g.loss)) throw TrainingError("non-finite loss; parameters exploded");
    return g;
}

struct AdamState {
    long t = 0;
    std::vector<std::vector<double>> m_w, v_w, m_b, v_b;
};

inline AdamState init_adam(const MLPModel& m) {
    AdamState st;
    const std::size_t L = m.layers.size();
    st.m_w.resize(L);
    st.v_w.resize(L);
    st.m_b.resize(L);
    st.v_b.resize(L);
    for (std::size_t li = 0; li < L; ++li) {
        st.m_w[li].assign(m.layers[li].w.size(), 0.0);
        st.v_w[li].assign(m.layers[li].w.size(), 0.0);
        st.m_b[li].assign(m.layers[li].b.size(), 0.0);
        st.v_b[li].assign(m.layers[li].b.size(), 0.0);
    }
    return st;
}

inline void adam_step(MLPModel& m, const ParamGrads& g, AdamState& st, double lr,
                      const TrainConfig& cfg) {
    ++st.t;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(st.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(st.t));
    auto update = [&](std::vector<double>& p, const std::vector<double>& grad, std::vector<double>& mm,
                      std::vector<double>& vv) {
        for (std::size_t i = 0; i < p.size(); ++i) {
            mm[i] = cfg.beta1 * mm[i] + (1.0 - cfg.beta1) * grad[i];
            vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * grad[i] * grad[i];
            double mhat = mm[i] / bc1;
            double vhat = vv[i] / bc2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    };
    for (std::size_t li = 0; li < m.layers.size(); ++li) {
        update(m.layers[li].w, g.w[li], st.m_w[li], st.v_w[li]);
        update(m.layers[li].b, g.b[li], st.m_b[li], st.v_b[li]);
    }
}

inline double mse_loss(const MLPModel& m, const WindowSet& ws) {
    if (ws.size() == 0) throw TrainingError("cannot evaluate loss on empty window set");
    double loss = 0.0;
    ForwardCache cache;
    for (std::size_t s = 0; s < ws.size(); ++s) {
        forward_cached(m, ws.inputs[s], cache);
        const auto& yhat = cache.a.back();
        for (int o = 0; o < ws.horizon; ++o) {
            double diff = yhat[o] - ws.targets[s][o];
            loss += diff * diff;
        }
    }
    return loss / (static_cast<double>(ws.size()) * ws.horizon);
}

struct EpochStats {
    double train_loss;
    double val_loss;
};

struct TrainResult {
    MLPModel model;  // parameters from the best validation epoch
    std::vector<EpochStats> history;
    int best_epoch = 0;   // 1-based
    int epochs_run = 0;
    bool pruned = false;
};

// Called after each epoch with (epoch, val_loss); returning true stops
// training early and marks the result pruned.
using PruneHook = std::function<bool(int, double)>;

// Mini-batch ADAM with seeded shuffling and early stopping: training stops
// once the validation loss has not improved for `patience` consecutive
// epochs, and the best-validation parameters are returned.
inline TrainResult train(MLPModel model, const WindowSet& train_ws, const WindowSet& val_ws,
                         const TrainConfig& cfg, const PruneHook& prune = nullptr) {
    if (train_ws.size() == 0 || val_ws.size() == 0)
        throw TrainingError("train and validation sets must be non-empty");
    if (cfg.patience < 1 || cfg.max_epochs < cfg.patience)
        throw ConfigError("need patience >= 1 and max_epochs >= patience");

    Rng shuffle_rng(derive_seed(cfg.seed, "shuffle", 0));
    AdamState adam = init_adam(model);
    const double lr = model.hp.learning_rate;
    const std::size_t batch_size = static_cast<std::size_t>(model.hp.batch_size);

    TrainResult res;
    res.model = model;
    double best_val = std::numeric_limits<double>::infinity();
    int since_best = 0;

    std::vector<std::size_t> order(train_ws.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        shuffle_rng.shuffle(order);
        double loss_sum = 0.0;
        std::size_t loss_n = 0;
        for (std::size_t off = 0; off < order.size(); off += batch_size) {
            std::size_t take = std::min(batch_size, order.size() - off);
            std::vector<std::size_t> batch(order.begin() + off, order.begin() + off + take);
            ParamGrads g = compute_gradients(model, train_ws, batch);
            adam_step(model, g, adam, lr, cfg);
            loss_sum += g.loss * static_cast<double>(take);
            loss_n += take;
        }
        double train_loss = loss_sum / static_cast<double>(loss_n);
        double val_loss = mse_loss(model, val_ws);
        if (!std::isfinite(train_loss) || !std::isfinite(val_loss))
            throw TrainingError("training diverged at epoch " + std::to_string(epoch));
        res.history.push_back({train_loss, val_loss});
        res.epochs_run = epoch;

        if (val_loss < best_val) {
            best_val = val_loss;
            res.best_epoch = epoch;
            res.model = model;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (prune && prune(epoch, val_loss)) {
            res.pruned = true;
            break;
        }
        if (since_best >= cfg.patience) break;
    }
    return res;
}

}  // namespace loadcast
