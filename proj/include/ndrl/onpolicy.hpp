#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ndrl/env.hpp"
#include "ndrl/mlp.hpp"
#include "ndrl/policy.hpp"

namespace ndrl {

struct TraceStep {
    Tensor state;
    ActionValue action;
    double reward = 0.0;
    double log_prob = 0.0;  // under the collection-time policy
    double value = 0.0;     // V(state) at collection time
};

// One episode. For truncated episodes the bootstrap value V(s_N) must be
// present; true terminals bootstrap with zero.
struct EpisodeTrace {
    std::vector<TraceStep> steps;
    bool truncated = false;
    double bootstrap_value = 0.0;
    Tensor final_state;

    std::size_t length() const { return steps.size(); }
};

struct ValueFunction {
    Mlp net;
    static ValueFunction make(const std::vector<int>& hidden, int state_dim, Rng& rng);
    double value(const Tensor& state) const;
};

// Return estimators over a trace suffix starting at t.
double mc_return(const EpisodeTrace& trace, std::size_t t);
double discounted_return(const EpisodeTrace& trace, std::size_t t, double gamma);
// n-step rewards plus gamma^n V(s_{t+n}); the bootstrap is omitted when the
// episode terminates inside the window (truncated tails bootstrap with V(s_N)).
double nstep_return_v(const EpisodeTrace& trace, std::size_t t, int n, const ValueFunction& v,
                      double gamma);
// Exponentially weighted n-step mixture; computed by the backward recursion
// (the direct weighted sum lives in the test oracle).
double lambda_return(const EpisodeTrace& trace, std::size_t t, double lambda,
                     const ValueFunction& v, double gamma);
std::vector<double> lambda_returns_all(const EpisodeTrace& trace, double lambda,
                                       const ValueFunction& v, double gamma);

// MSE regression of V(s) onto constant targets; accumulates grads, returns loss.
double value_loss(ValueFunction& v, std::span<const Tensor> states,
                  std::span<const double> targets);

double advantage_td0(const EpisodeTrace& trace, std::size_t t, const ValueFunction& v,
                     double gamma);
// GAE over the whole trace via the backward delta recursion
// A_t = delta_t + gamma * lambda * A_{t+1}.
std::vector<double> gae(const EpisodeTrace& trace, double lambda, const ValueFunction& v,
                        double gamma);

// Segment-level GAE core shared with the PPO batch path. values has one entry
// per step; v_end is the bootstrap value after the last step (0 for true
// terminals).
std::vector<double> gae_core(std::span<const double> rewards, std::span<const double> values,
                             double v_end, double gamma, double lambda);

// REINFORCE loss -mean(log pi(a|s) * (G - b)); G and b are constants.
// Accumulates grads into the policy trunk and returns the loss.
struct ReinforceRow {
    Tensor state;
    ActionValue action;
    double objective = 0.0;  // G
    double baseline = 0.0;   // b(s)
};
double reinforce_loss(PolicyHead& pi, std::span<const ReinforceRow> rows);

// exp(log_prob_now - log_prob_behavior); the behavior term is a constant.
// Ratios outside [1e-6, 1e6] bump the explosion counter when provided.
double importance_weight(double log_prob_now, double log_prob_behavior,
                         std::uint64_t* explosion_counter = nullptr);

}  // namespace ndrl
