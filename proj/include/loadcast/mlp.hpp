#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "loadcast/errors.hpp"
#include "loadcast/rng.hpp"

namespace loadcast {

struct Hyperparameters {
    int num_layers = 2;            // hidden layers
    std::vector<int> layer_sizes;  // width per hidden layer
    int lookback = 168;            // input dimension l
    int horizon = 24;              // output dimension
    double learning_rate = 1e-4;
    int batch_size = 256;
};

enum class Activation { ReLU, Sigmoid, Tanh };

inline const char* activation_name(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Sigmoid: return "sigmoid";
        case Activation::Tanh: return "tanh";
    }
    return "relu";
}

inline Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "sigmoid") return Activation::Sigmoid;
    if (name == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation '" + name + "'");
}

inline double activate(Activation a, double z) {
    switch (a) {
        case Activation::ReLU: return z > 0 ? z : 0.0;
        case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-z));
        case Activation::Tanh: return std::tanh(z);
    }
    return z;
}

// Derivative expressed through the activation value where possible.
inline double activate_grad(Activation a, double z, double out) {
    switch (a) {
        case Activation::ReLU: return z > 0 ? 1.0 : 0.0;
        case Activation::Sigmoid: return out * (1.0 - out);
        case Activation::Tanh: return 1.0 - out * out;
    }
    return 1.0;
}

struct DenseLayer {
    int in_dim = 0;
    int out_dim = 0;
    std::vector<double> w;  // row-major, w[o*in_dim + i]
    std::vector<double> b;  // out_dim
};

// Hidden layers use the configured activation; the output layer is affine.
struct MLPModel {
    Hyperparameters hp;
    Activation hidden_activation = Activation::ReLU;
    std::vector<DenseLayer> layers;  // hp.num_layers hidden + 1 output

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.w.size() + l.b.size();
        return n;
    }
};

inline void validate_hyperparameters(const Hyperparameters& hp) {
    if (hp.num_layers < 1) throw ConfigError("need at least one hidden layer");
    if (static_cast<int>(hp.layer_sizes.size()) != hp.num_layers)
        throw ConfigError("layer_sizes length must equal num_layers");
    for (int s : hp.layer_sizes)
        if (s < 1) throw ConfigError("layer sizes must be positive");
    if (hp.lookback < 1 || hp.horizon < 1) throw ConfigError("lookback and horizon must be positive");
    if (hp.learning_rate <= 0) throw ConfigError("learning rate must be positive");
    if (hp.batch_size < 1) throw ConfigError("batch size must be positive");
}

// He-style uniform fan-in init: w ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)),
// biases zero. Draw order is fixed (layer by layer, row-major).
inline MLPModel make_mlp(const Hyperparameters& hp, Activation act, std::uint64_t seed) {
    validate_hyperparameters(hp);
    MLPModel m;
    m.hp = hp;
    m.hidden_activation = act;
    Rng rng(seed);
    int in_dim = hp.lookback;
    for (int layer = 0; layer <= hp.num_layers; ++layer) {
        int out_dim = layer < hp.num_layers ? hp.layer_sizes[layer] : hp.horizon;
        DenseLayer dl;
        dl.in_dim = in_dim;
        dl.out_dim = out_dim;
        dl.w.resize(static_cast<std::size_t>(in_dim) * out_dim);
        dl.b.assign(out_dim, 0.0);
        double limit = std::sqrt(6.0 / in_dim);
        for (auto& w : dl.w) w = rng.uniform(-limit, limit);
        m.layers.push_back(std::move(dl));
        in_dim = out_dim;
    }
    return m;
}

// Per-layer pre-activations and activations kept for backprop.
// a[0] is the input; for layer i, z[i] is the pre-activation and a[i+1] the
// activation (a.back() is the network output).
struct ForwardCache {
    std::vector<std::vector<double>> z;
    std::vector<std::vector<double>> a;
};

inline void forward_cached(const MLPModel& m, const std::vector<double>& input, ForwardCache& cache) {
    if (static_cast<int>(input.size()) != m.hp.lookback)
        throw TrainingError("input length " + std::to_string(input.size()) + " != lookback " +
                            std::to_string(m.hp.lookback));
    const std::size_t L = m.layers.size();
    cache.z.resize(L);
    cache.a.resize(L + 1);
    cache.a[0] = input;
    for (std::size_t li = 0; li < L; ++li) {
        const DenseLayer& dl = m.layers[li];
        const std::vector<double>& x = cache.a[li];
        auto& z = cache.z[li];
        z.assign(dl.out_dim, 0.0);
        for (int o = 0; o < dl.out_dim; ++o) {
            double acc = dl.b[o];
            const double* wrow = dl.w.data() + static_cast<std::size_t>(o) * dl.in_dim;
            for (int i = 0; i < dl.in_dim; ++i) acc += wrow[i] * x[i];
            z[o] = acc;
        }
        auto& a = cache.a[li + 1];
        a.resize(dl.out_dim);
        const bool last = li + 1 == L;
        for (int o = 0; o < dl.out_dim; ++o) a[o] = last ? z[o] : activate(m.hidden_activation, z[o]);
    }
}

inline std::vector<double> forward(const MLPModel& m, const std::vector<double>& input) {
    ForwardCache cache;
    forward_cached(m, input, cache);
    return cache.a.back();
}

// Versioned text persistence with 17 significant digits per value; a
// load -> save round trip is byte-identical.
inline void save_model(const MLPModel& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write model file '" + path + "'");
    char buf[64];
    out << "loadcast-model v1\n";
    out << "lookback " << m.hp.lookback << "\n";
    out << "horizon " << m.hp.horizon << "\n";
    out << "activation " << activation_name(m.hidden_activation) << "\n";
    out << "hidden " << m.hp.num_layers;
    for (int s : m.hp.layer_sizes) out << ' ' << s;
    out << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", m.hp.learning_rate);
    out << "lr " << buf << "\n";
    out << "batch " << m.hp.batch_size << "\n";
    for (const auto& dl : m.layers) {
        out << "layer " << dl.in_dim << ' ' << dl.out_dim << "\n";
        for (int o = 0; o < dl.out_dim; ++o) {
            for (int i = 0; i < dl.in_dim; ++i) {
                std::snprintf(buf, sizeof buf, "%.17g", dl.w[static_cast<std::size_t>(o) * dl.in_dim + i]);
                out << (i ? " " : "") << buf;
            }
            out << "\n";
        }
        for (int o = 0; o < dl.out_dim; ++o) {
            std::snprintf(buf, sizeof buf, "%.17g", dl.b[o]);
            out << (o ? " " : "") << buf;
        }
        out << "\n";
    }
    out << "end\n";
    if (!out) throw DataError("write failed for model file '" + path + "'");
}

namespace detail {

inline std::vector<double> parse_value_row(const std::string& line, int expect, const std::string& path) {
    std::vector<double> vals;
    vals.reserve(expect);
    const char* p = line.c_str();
    char* end = nullptr;
    while (*p) {
        double v = std::strtod(p, &end);
        if (end == p) break;
        vals.push_back(v);
        p = end;
    }
    if (static_cast<int>(vals.size()) != expect)
        throw DataError("model file '" + path + "': expected " + std::to_string(expect) +
                        " values, got " + std::to_string(vals.size()));
    return vals;
}

}  // namespace detail

inline MLPModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    auto next_line = [&](const char* what) {
        std::string line;
        if (!std::getline(in, line)) throw DataError("model file '" + path + "': missing " + std::string(what));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        return line;
    };
    if (next_line("magic") != "loadcast-model v1")
        throw DataError("model file '" + path + "': unknown format");

    MLPModel m;
    auto read_kv = [&](const char* key) {
        std::string line = next_line(key);
        std::istringstream ss(line);
        std::string k;
        ss >> k;
        if (k != key) throw DataError("model file '" + path + "': expected '" + key + "', got '" + k + "'");
        return ss;
    };
    {
        auto ss = read_kv("lookback");
        ss >> m.hp.lookback;
    }
    {
        auto ss = read_kv("horizon");
        ss >> m.hp.horizon;
    }
    {
        auto ss = read_kv("activation");
        std::string name;
        ss >> name;
        m.hidden_activation = activation_from_name(name);
    }
    {
        auto ss = read_kv("hidden");
        ss >> m.hp.num_layers;
        m.hp.layer_sizes.clear();
        for (int i = 0; i < m.hp.num_layers; ++i) {
            int s = 0;
            if (!(ss >> s)) throw DataError("model file '" + path + "': truncated hidden sizes");
            m.hp.layer_sizes.push_back(s);
        }
    }
    {
        auto ss = read_kv("lr");
        ss >> m.hp.learning_rate;
    }
    {
        auto ss = read_kv("batch");
        ss >> m.hp.batch_size;
    }
    validate_hyperparameters(m.hp);

    for (int layer = 0; layer <= m.hp.num_layers; ++layer) {
        std::istringstream ss(next_line("layer header"));
        std::string k;
        DenseLayer dl;
        ss >> k >> dl.in_dim >> dl.out_dim;
        if (k != "layer" || dl.in_dim < 1 || dl.out_dim < 1)
            throw DataError("model file '" + path + "': bad layer header");
        dl.w.reserve(static_cast<std::size_t>(dl.in_dim) * dl.out_dim);
        for (int o = 0; o < dl.out_dim; ++o) {
            auto row = detail::parse_value_row(next_line("weight row"), dl.in_dim, path);
            dl.w.insert(dl.w.end(), row.begin(), row.end());
        }
        dl.b = detail::parse_value_row(next_line("bias row"), dl.out_dim, path);
        m.layers.push_back(std::move(dl));
    }
    if (next_line("end marker") != "end") throw DataError("model file '" + path + "': missing end marker");

    int expect_in = m.hp.lookback;
    for (int layer = 0; layer <= m.hp.num_layers; ++layer) {
        int expect_out = layer < m.hp.num_layers ? m.hp.layer_sizes[layer] : m.hp.horizon;
        if (m.layers[layer].in_dim != expect_in || m.layers[layer].out_dim != expect_out)
            throw DataError("model file '" + path + "': layer shape chain broken");
        expect_in = expect_out;
    }
    return m;
}

}  // namespace loadcast
