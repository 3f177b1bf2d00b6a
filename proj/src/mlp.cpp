#include "ndrl/mlp.hpp"

#include <cmath>

#include "ndrl/errors.hpp"

namespace ndrl {

Activation activation_from_string(const std::string& s) {
    if (s == "identity") return Activation::Identity;
    if (s == "relu") return Activation::ReLU;
    if (s == "tanh") return Activation::Tanh;
    throw ConfigError("unknown activation '" + s + "' (expected identity|relu|tanh)");
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::Identity: return "identity";
        case Activation::ReLU: return "relu";
        case Activation::Tanh: return "tanh";
    }
    return "?";
}

namespace {

double apply_act(Activation a, double z) {
    switch (a) {
        case Activation::Identity: return z;
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return std::tanh(z);
    }
    return z;
}

// Derivative in terms of pre-activation z and post-activation y.
double act_grad(Activation a, double z, double y) {
    switch (a) {
        case Activation::Identity: return 1.0;
        case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: return 1.0 - y * y;
    }
    return 1.0;
}

}  // namespace

Mlp::Mlp(std::vector<int> sizes, std::vector<Activation> acts, Rng& rng)
    : layer_sizes(std::move(sizes)), activations(std::move(acts)) {
    if (layer_sizes.size() < 2) throw ConfigError("Mlp needs at least input and output sizes");
    for (int s : layer_sizes) {
        if (s <= 0) throw ConfigError("Mlp layer sizes must be positive");
    }
    if (activations.size() != layer_sizes.size() - 1) {
        throw ConfigError("Mlp needs one activation per layer: got " +
                          std::to_string(activations.size()) + " for " +
                          std::to_string(layer_sizes.size() - 1) + " layers");
    }
    std::size_t n_layers = layer_sizes.size() - 1;
    weights.resize(n_layers);
    biases.resize(n_layers);
    weight_grads.resize(n_layers);
    bias_grads.resize(n_layers);
    for (std::size_t l = 0; l < n_layers; ++l) {
        int fan_in = layer_sizes[l];
        int fan_out = layer_sizes[l + 1];
        double limit = std::sqrt(6.0 / (fan_in + fan_out));
        weights[l].resize(static_cast<std::size_t>(fan_in) * fan_out);
        for (auto& w : weights[l]) w = rng.uniform(-limit, limit);
        biases[l].assign(static_cast<std::size_t>(fan_out), 0.0);
        weight_grads[l].assign(weights[l].size(), 0.0);
        bias_grads[l].assign(biases[l].size(), 0.0);
    }
}

Mlp Mlp::make(const std::vector<int>& sizes, Activation hidden_act, Activation out_act, Rng& rng) {
    std::vector<Activation> acts(sizes.size() - 1, hidden_act);
    acts.back() = out_act;
    return Mlp(sizes, std::move(acts), rng);
}

std::size_t Mlp::param_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < num_layers(); ++l) n += weights[l].size() + biases[l].size();
    return n;
}

std::vector<double> Mlp::forward_raw(std::span<const double> input, MlpCache* cache) const {
    if (static_cast<int>(input.size()) != input_dim()) {
        throw DimensionError("Mlp forward: expected input length " + std::to_string(input_dim()) +
                             ", got " + std::to_string(input.size()));
    }
    if (cache) {
        cache->input.assign(input.begin(), input.end());
        cache->pre.resize(num_layers());
        cache->post.resize(num_layers());
    }
    std::vector<double> cur(input.begin(), input.end());
    for (std::size_t l = 0; l < num_layers(); ++l) {
        int in = layer_sizes[l];
        int out = layer_sizes[l + 1];
        std::vector<double> z(biases[l]);
        const double* w = weights[l].data();
        for (int o = 0; o < out; ++o) {
            double acc = 0.0;
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) acc += row[i] * cur[i];
            z[o] += acc;
        }
        std::vector<double> y(out);
        for (int o = 0; o < out; ++o) y[o] = apply_act(activations[l], z[o]);
        if (cache) {
            cache->pre[l] = z;
            cache->post[l] = y;
        }
        cur = std::move(y);
    }
    if (cache) cache->valid = true;
    return cur;
}

Tensor Mlp::forward(const Tensor& input) const { return Tensor::vec(forward_raw(input.data, nullptr)); }

Tensor Mlp::forward(const Tensor& input, MlpCache& cache) const {
    return Tensor::vec(forward_raw(input.data, &cache));
}

std::vector<double> Mlp::backward(const MlpCache& cache, std::span<const double> out_grad,
                                  bool accumulate_params) {
    if (!cache.valid) throw StateError("Mlp backward: forward with caching was not run");
    if (static_cast<int>(out_grad.size()) != output_dim()) {
        throw DimensionError("Mlp backward: expected grad length " + std::to_string(output_dim()) +
                             ", got " + std::to_string(out_grad.size()));
    }
    std::vector<double> da(out_grad.begin(), out_grad.end());
    for (std::size_t li = num_layers(); li-- > 0;) {
        int in = layer_sizes[li];
        int out = layer_sizes[li + 1];
        const std::vector<double>& z = cache.pre[li];
        const std::vector<double>& y = cache.post[li];
        const std::vector<double>& a_prev = (li == 0) ? cache.input : cache.post[li - 1];
        std::vector<double> dz(out);
        for (int o = 0; o < out; ++o) dz[o] = da[o] * act_grad(activations[li], z[o], y[o]);
        if (accumulate_params) {
            double* gw = weight_grads[li].data();
            for (int o = 0; o < out; ++o) {
                bias_grads[li][o] += dz[o];
                double* row = gw + static_cast<std::size_t>(o) * in;
                for (int i = 0; i < in; ++i) row[i] += dz[o] * a_prev[i];
            }
        }
        std::vector<double> da_prev(in, 0.0);
        const double* w = weights[li].data();
        for (int o = 0; o < out; ++o) {
            const double* row = w + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) da_prev[i] += row[i] * dz[o];
        }
        da = std::move(da_prev);
    }
    return da;
}

void Mlp::zero_grads() {
    for (auto& g : weight_grads) std::fill(g.begin(), g.end(), 0.0);
    for (auto& g : bias_grads) std::fill(g.begin(), g.end(), 0.0);
}

std::vector<Mlp::TensorRef> Mlp::param_refs(const std::string& prefix) {
    std::vector<TensorRef> refs;
    refs.reserve(num_layers() * 2);
    for (std::size_t l = 0; l < num_layers(); ++l) {
        refs.push_back({prefix + ".w" + std::to_string(l), std::span<double>(weights[l]),
                        std::span<double>(weight_grads[l]),
                        {static_cast<std::size_t>(layer_sizes[l + 1]),
                         static_cast<std::size_t>(layer_sizes[l])}});
        refs.push_back({prefix + ".b" + std::to_string(l), std::span<double>(biases[l]),
                        std::span<double>(bias_grads[l]),
                        {static_cast<std::size_t>(layer_sizes[l + 1])}});
    }
    return refs;
}

void Mlp::copy_from(const Mlp& other) {
    if (layer_sizes != other.layer_sizes) {
        throw CheckpointError("Mlp copy: layer sizes differ");
    }
    weights = other.weights;
    biases = other.biases;
}

void Mlp::polyak_from(const Mlp& other, double tau) {
    if (layer_sizes != other.layer_sizes) {
        throw CheckpointError("Mlp polyak update: layer sizes differ");
    }
    for (std::size_t l = 0; l < num_layers(); ++l) {
        for (std::size_t i = 0; i < weights[l].size(); ++i) {
            weights[l][i] = tau * weights[l][i] + (1.0 - tau) * other.weights[l][i];
        }
        for (std::size_t i = 0; i < biases[l].size(); ++i) {
            biases[l][i] = tau * biases[l][i] + (1.0 - tau) * other.biases[l][i];
        }
    }
}

}  // namespace ndrl
