#pragma once

#include <span>
#include <string>
#include <vector>

#include "ndrl/rng.hpp"
#include "ndrl/tensor.hpp"

namespace ndrl {

enum class Activation { Identity, ReLU, Tanh };

Activation activation_from_string(const std::string& s);
std::string to_string(Activation a);

// Per-forward activation cache; required by backward().
struct MlpCache {
    std::vector<double> input;
    std::vector<std::vector<double>> pre;   // z_l = W_l a_{l-1} + b_l
    std::vector<std::vector<double>> post;  // a_l = act(z_l)
    bool valid = false;
};

// Fixed-topology feed-forward network with explicit gradient storage.
// Weights of layer l have shape (layer_sizes[l+1], layer_sizes[l]), row-major.
// Gradients are zeroed at construction and after each optimizer step; backward
// accumulates (+=) so losses can be summed before stepping.
struct Mlp {
    std::vector<int> layer_sizes;
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
    std::vector<Activation> activations;  // one per layer
    std::vector<std::vector<double>> weight_grads;
    std::vector<std::vector<double>> bias_grads;

    Mlp() = default;
    // Xavier-uniform weight init, zero biases.
    Mlp(std::vector<int> sizes, std::vector<Activation> acts, Rng& rng);

    // Hidden layers use `hidden_act`, output layer `out_act`.
    static Mlp make(const std::vector<int>& sizes, Activation hidden_act, Activation out_act,
                    Rng& rng);

    int input_dim() const { return layer_sizes.front(); }
    int output_dim() const { return layer_sizes.back(); }
    std::size_t num_layers() const { return weights.size(); }
    std::size_t param_count() const;

    // Pure forward; input length must equal input_dim.
    Tensor forward(const Tensor& input) const;
    // Forward with activation caching for a subsequent backward().
    Tensor forward(const Tensor& input, MlpCache& cache) const;

    // Accumulates dLoss/dParam into the grad arrays (unless accumulate_params
    // is false) and returns dLoss/dInput. Throws StateError without a cache.
    std::vector<double> backward(const MlpCache& cache, std::span<const double> out_grad,
                                 bool accumulate_params = true);

    void zero_grads();

    // Named views over parameters and grads, e.g. "actor.w0", "actor.b0", ...
    struct TensorRef {
        std::string name;
        std::span<double> value;
        std::span<double> grad;
        std::vector<std::size_t> shape;
    };
    std::vector<TensorRef> param_refs(const std::string& prefix);

    void copy_from(const Mlp& other);
    // this = tau * this + (1 - tau) * other
    void polyak_from(const Mlp& other, double tau);

private:
    std::vector<double> forward_raw(std::span<const double> input, MlpCache* cache) const;
};

}  // namespace ndrl
