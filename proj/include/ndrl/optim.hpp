#pragma once

#include <cstdint>
#include <vector>

#include "ndrl/mlp.hpp"

namespace ndrl {

struct AdamConfig {
    double lr = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    // Global-norm gradient clip over all tensors in one step; <= 0 disables.
    double clip_norm = 10.0;
};

// Adam with bias correction. Moments are laid out per tensor in the order the
// refs are first passed; subsequent calls must pass the same tensor list.
// Grads are zeroed after each step. A non-finite gradient aborts with a
// DivergenceError naming the parameter.
class AdamState {
public:
    AdamState() = default;
    explicit AdamState(AdamConfig cfg) : cfg_(cfg) {}

    void step(std::vector<Mlp::TensorRef> refs);

    std::int64_t step_count() const { return t_; }
    double lr() const { return cfg_.lr; }
    void set_lr(double lr) { cfg_.lr = lr; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::int64_t t_ = 0;
    std::vector<std::vector<double>> m_;
    std::vector<std::vector<double>> v_;
};

// Single-step convenience wrapper matching the flat-parameter contract.
void adam_step(std::vector<Mlp::TensorRef> refs, AdamState& state);

}  // namespace ndrl
