#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ndrl/env.hpp"
#include "ndrl/mlp.hpp"
#include "ndrl/rng.hpp"

namespace ndrl {

enum class PolicyKind { Categorical, DiagonalGaussian, TanhGaussian, Deterministic };

// Everything produced by one sampling pass, including what the backward
// passes need (trunk cache, noise, pre-squash values).
struct PolicySample {
    ActionValue action;
    double log_prob = 0.0;
    MlpCache cache;
    std::vector<double> probs;       // categorical
    std::vector<double> mean;        // continuous heads
    std::vector<double> log_std;     // clamped
    std::vector<double> log_std_raw; // trunk output before clamping
    std::vector<double> sigma;
    std::vector<double> xi;          // injected/drawn standard normal noise
    std::vector<double> pre_squash;  // u = mean + sigma * xi
};

// Policy distribution over an Mlp trunk. Categorical heads read n logits from
// the trunk; Gaussian heads read (mean, log_std) pairs; Deterministic heads
// read the action directly.
//
// The reparametrized sample path is differentiable treating the noise as a
// constant; backward_reparam pushes (dL/da, dL/dlogpi) through it into the
// trunk and returns dL/dinput for shared-backbone setups.
class PolicyHead {
public:
    static constexpr double kLogStdMin = -5.0;
    static constexpr double kLogStdMax = 2.0;
    static constexpr double kTanhEps = 1e-6;

    PolicyHead() = default;
    PolicyHead(PolicyKind kind, Mlp trunk, int action_count_or_dim);

    PolicyKind kind() const { return kind_; }
    int action_count() const { return n_; }   // categorical
    int action_dim() const { return n_; }     // continuous
    Mlp& trunk() { return trunk_; }
    const Mlp& trunk() const { return trunk_; }
    bool stochastic() const { return kind_ != PolicyKind::Deterministic; }

    PolicySample sample(const Tensor& state, Rng& rng) const;
    // Noise injection for tests and frozen-noise gradient checks. For the
    // categorical head, noise[0] in [0,1) is the inverse-CDF draw.
    PolicySample sample_given_noise(const Tensor& state, std::span<const double> noise) const;

    double log_prob(const Tensor& state, const ActionValue& action) const;
    double log_prob_cached(const Tensor& state, const ActionValue& action, MlpCache& cache) const;

    // Exact for Categorical / DiagonalGaussian; one-sample estimate for
    // TanhGaussian (needs the rng and is stochastic).
    double entropy(const Tensor& state, Rng* rng = nullptr) const;

    ActionValue act_greedy(const Tensor& state) const;
    std::vector<double> probs(const Tensor& state) const;  // categorical only

    // Reparametrized-path backward: accumulates trunk grads for
    // d_action . da + d_logprob * dlogpi with the sample's noise frozen.
    // Returns dL/dinput.
    std::vector<double> backward_reparam(const PolicySample& s, std::span<const double> d_action,
                                         double d_logprob);
    // Score-function backward for a fixed action: accumulates trunk grads for
    // d_logprob * dlogpi(a|s). Returns dL/dinput.
    std::vector<double> backward_log_prob(const MlpCache& cache, const ActionValue& action,
                                          double d_logprob);
    // d_out * d(sum_a pi log pi)/dparams for the categorical head (the
    // minimized entropy term). Returns dL/dinput.
    std::vector<double> backward_sum_p_log_p(const MlpCache& cache, double d_out);

private:
    PolicyKind kind_ = PolicyKind::Categorical;
    Mlp trunk_;
    int n_ = 0;

    struct GaussView {
        std::vector<double> mean, log_std, log_std_raw, sigma;
    };
    GaussView gauss_view(std::span<const double> trunk_out) const;
    void check_state_dim(const Tensor& state) const;
};

// Epsilon-greedy (discrete) or additive Gaussian noise (continuous)
// exploration with a step-indexed schedule.
struct ExplorationSchedule {
    enum class Kind { EpsilonGreedy, GaussianNoise };
    enum class Decay { Linear, Exponential };

    Kind kind = Kind::EpsilonGreedy;
    double start = 1.0;
    double end = 0.1;
    std::int64_t decay_steps = 10000;
    Decay decay = Decay::Linear;
    double sigma = 0.1;
    std::int64_t step_count = 0;

    double epsilon() const;  // value at the current step
    // Applies exploration to a greedy action and advances the step counter.
    ActionValue explore(const ActionValue& greedy, const ActionKind& space, Rng& rng);
};

}  // namespace ndrl
