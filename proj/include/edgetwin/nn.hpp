#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "edgetwin/errors.hpp"
#include "edgetwin/rng.hpp"

namespace edgetwin {

// Fully connected net: ReLU on every hidden layer, identity output. Weights
// are row-major [out x in]. Everything is plain doubles on purpose; the
// training loop needs exact, reproducible arithmetic more than it needs speed.

struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // out * in, row-major
    std::vector<double> b;  // out
};

struct Network {
    std::vector<int> dims;  // [input, hidden..., output]
    std::vector<Layer> layers;

    int input_size() const { return dims.front(); }
    int output_size() const { return dims.back(); }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& l : layers) n += l.w.size() + l.b.size();
        return n;
    }
};

// Glorot-uniform init: U(+-sqrt(6/(fan_in+fan_out))), zero biases.
inline Network make_network(const std::vector<int>& dims, std::uint64_t seed) {
    if (dims.size() < 2) throw LifecycleError("make_network: need at least two dims");
    for (int d : dims)
        if (d <= 0) throw LifecycleError("make_network: nonpositive layer size");
    Network net;
    net.dims = dims;
    Rng rng(seed);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        Layer layer;
        layer.in = dims[l];
        layer.out = dims[l + 1];
        const double bound = std::sqrt(6.0 / (layer.in + layer.out));
        layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
        for (auto& w : layer.w) w = rng.uniform(-bound, bound);
        layer.b.assign(layer.out, 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

// Forward pass with everything backward() needs: pre-activations per layer
// plus the post-activation chain starting at the input itself.
struct Activations {
    std::vector<std::vector<double>> pre;   // one per layer
    std::vector<std::vector<double>> post;  // post[0] = input, post[l+1] = layer l output
};

inline Activations forward(const Network& net, const std::vector<double>& input) {
    if (static_cast<int>(input.size()) != net.input_size())
        throw LifecycleError("forward: input size mismatch");
    Activations acts;
    acts.post.push_back(input);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        const Layer& layer = net.layers[l];
        const auto& x = acts.post.back();
        std::vector<double> pre(layer.out);
        for (int o = 0; o < layer.out; ++o) {
            double sum = layer.b[o];
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) sum += row[i] * x[i];
            pre[o] = sum;
        }
        std::vector<double> post(layer.out);
        const bool is_output = (l + 1 == net.layers.size());
        for (int o = 0; o < layer.out; ++o)
            post[o] = is_output ? pre[o] : (pre[o] > 0.0 ? pre[o] : 0.0);
        acts.pre.push_back(std::move(pre));
        acts.post.push_back(std::move(post));
    }
    return acts;
}

inline std::vector<double> output_of(const Network& net, const std::vector<double>& input) {
    return forward(net, input).post.back();
}

struct GradientSet {
    std::vector<std::vector<double>> w;  // matches Layer::w shapes
    std::vector<std::vector<double>> b;
};

inline GradientSet zero_gradients(const Network& net) {
    GradientSet g;
    for (const auto& layer : net.layers) {
        g.w.emplace_back(layer.w.size(), 0.0);
        g.b.emplace_back(layer.b.size(), 0.0);
    }
    return g;
}

// Reverse pass: upstream is dL/d(output). Returns exact parameter gradients;
// ReLU subgradient at 0 is taken as 0.
inline GradientSet backward(const Network& net, const Activations& acts,
                            const std::vector<double>& upstream) {
    if (static_cast<int>(upstream.size()) != net.output_size())
        throw LifecycleError("backward: upstream size mismatch");
    if (acts.pre.size() != net.layers.size())
        throw LifecycleError("backward: activations do not match this network");

    GradientSet grads = zero_gradients(net);
    std::vector<double> dpre = upstream;  // identity output layer
    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
        const Layer& layer = net.layers[l];
        const auto& x = acts.post[l];
        auto& dw = grads.w[l];
        auto& db = grads.b[l];
        for (int o = 0; o < layer.out; ++o) {
            db[o] = dpre[o];
            double* dw_row = dw.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) dw_row[i] = dpre[o] * x[i];
        }
        if (l == 0) break;
        std::vector<double> dx(layer.in, 0.0);
        for (int o = 0; o < layer.out; ++o) {
            const double* row = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
            for (int i = 0; i < layer.in; ++i) dx[i] += row[i] * dpre[o];
        }
        const auto& prev_pre = acts.pre[l - 1];
        for (std::size_t i = 0; i < dx.size(); ++i)
            dx[i] = prev_pre[i] > 0.0 ? dx[i] : 0.0;
        dpre = std::move(dx);
    }
    return grads;
}

enum class Direction { Descend, Ascend };

// Pure update: theta -+ rate * grad, leaving the input net untouched.
inline Network apply_update(const Network& net, const GradientSet& grads, double rate,
                            Direction direction) {
    if (grads.w.size() != net.layers.size())
        throw LifecycleError("apply_update: gradient shape mismatch");
    const double sign = direction == Direction::Descend ? -1.0 : 1.0;
    Network out = net;
    for (std::size_t l = 0; l < out.layers.size(); ++l) {
        if (grads.w[l].size() != out.layers[l].w.size() ||
            grads.b[l].size() != out.layers[l].b.size())
            throw LifecycleError("apply_update: gradient shape mismatch");
        for (std::size_t i = 0; i < out.layers[l].w.size(); ++i)
            out.layers[l].w[i] += sign * rate * grads.w[l][i];
        for (std::size_t i = 0; i < out.layers[l].b.size(); ++i)
            out.layers[l].b[i] += sign * rate * grads.b[l][i];
    }
    return out;
}

// Max-subtracted softmax; safe for large logits.
inline std::vector<double> softmax_policy(const std::vector<double>& logits) {
    if (logits.empty()) throw LifecycleError("softmax_policy: empty logits");
    double max_logit = logits[0];
    for (double v : logits) {
        if (!std::isfinite(v)) throw NumericError("softmax_policy: nonfinite logit");
        if (v > max_logit) max_logit = v;
    }
    std::vector<double> probs(logits.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - max_logit);
        sum += probs[i];
    }
    for (auto& p : probs) p /= sum;
    return probs;
}

// ---------------------------------------------------------------------------
// checkpoints
// ---------------------------------------------------------------------------

inline constexpr const char* kCheckpointFormat = "edgetwin-net";
inline constexpr int kCheckpointVersion = 1;

inline nlohmann::json network_to_json(const Network& net) {
    nlohmann::json j;
    j["format"] = kCheckpointFormat;
    j["version"] = kCheckpointVersion;
    j["dims"] = net.dims;
    auto& layers = j["layers"] = nlohmann::json::array();
    for (const auto& layer : net.layers)
        layers.push_back({{"w", layer.w}, {"b", layer.b}});
    return j;
}

inline Network network_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("format", std::string{}) != kCheckpointFormat)
        throw DataError("checkpoint: unrecognized format");
    if (j.value("version", -1) != kCheckpointVersion)
        throw DataError("checkpoint: unsupported version");
    Network net;
    net.dims = j.at("dims").get<std::vector<int>>();
    if (net.dims.size() < 2) throw DataError("checkpoint: bad dims");
    const auto& layers = j.at("layers");
    if (layers.size() + 1 != net.dims.size())
        throw DataError("checkpoint: layer count does not match dims");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        Layer layer;
        layer.in = net.dims[l];
        layer.out = net.dims[l + 1];
        layer.w = layers[l].at("w").get<std::vector<double>>();
        layer.b = layers[l].at("b").get<std::vector<double>>();
        if (layer.w.size() != static_cast<std::size_t>(layer.in) * layer.out ||
            layer.b.size() != static_cast<std::size_t>(layer.out))
            throw DataError("checkpoint: weight shape does not match dims");
        net.layers.push_back(std::move(layer));
    }
    return net;
}

inline void save_network(const Network& net, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("checkpoint: cannot open for write: " + path);
    out << network_to_json(net).dump(2) << "\n";
}

inline Network load_network(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("checkpoint: cannot open: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("checkpoint: parse failure: ") + e.what());
    }
    return network_from_json(j);
}

}  // namespace edgetwin
