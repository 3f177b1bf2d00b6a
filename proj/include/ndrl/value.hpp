#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ndrl/env.hpp"
#include "ndrl/mlp.hpp"
#include "ndrl/policy.hpp"

namespace ndrl {

enum class QInputMode {
    StateToAllActions,   // one output per discrete action
    StateActionToScalar  // concatenated (s, a) input, scalar output
};

struct QFunction {
    Mlp net;
    QInputMode mode = QInputMode::StateToAllActions;
    int n_actions = 0;   // discrete mode
    int action_dim = 0;  // continuous mode

    static QFunction discrete(Mlp net, int n_actions);
    static QFunction continuous(Mlp net, int action_dim);
    // Lookup table as a one-layer identity net over one-hot states;
    // weights[0][a * n_states + s] is Q(s, a).
    static QFunction tabular(int n_states, int n_actions);

    Tensor q_all(const Tensor& state) const;  // discrete mode
    int argmax_action(const Tensor& state) const;  // ties toward lowest index
    double max_q(const Tensor& state) const;

    double q_sa(const Tensor& state, std::span<const double> action) const;  // continuous mode
    double q_sa_cached(const Tensor& state, std::span<const double> action, MlpCache& cache) const;
};

// Frozen copy of a QFunction; parameters change only via update().
struct TargetNetwork {
    enum class Mode { HardCopy, Polyak };
    QFunction q;
    Mode mode = Mode::Polyak;
    int period = 1000;   // hard-copy cadence
    double tau = 0.995;  // param' = tau * param' + (1 - tau) * param
    std::int64_t counter = 0;

    static TargetNetwork polyak(const QFunction& online, double tau);
    static TargetNetwork hard_copy(const QFunction& online, int period);
    void update(const QFunction& online);
};

struct DiscountedHorizon {
    double gamma = 0.99;
    explicit DiscountedHorizon(double g);
};

// One-step bootstrapped targets. All of them return exactly r when done; the
// bootstrap term is a constant with respect to gradients.
double td0_target(const QFunction& q_tgt, double r, const Tensor& s_next, bool done, double gamma);

double double_q_target(const QFunction& q_online, const QFunction& q_tgt, double r,
                       const Tensor& s_next, bool done, double gamma);

// a' = pi(s'): greedy mean by default; pass an rng to draw a' ~ pi(.|s').
double twin_q_target(const QFunction& q1_tgt, const QFunction& q2_tgt, const PolicyHead& pi,
                     double r, const Tensor& s_next, bool done, double gamma, Rng* rng = nullptr);

// sum_{i<n} gamma^i r_i + gamma^n * double-Q bootstrap at s_end, zeroed when
// the episode terminated inside the window. n = 1 reduces to double_q_target.
double nstep_q_target(const QFunction& q_tgt, const QFunction& q_online,
                      std::span<const double> rewards, const Tensor& s_end, bool done_within,
                      double gamma, int n);

// One-step Q regression (episode length 1 data). Scalar mode regresses
// Q(s,a) onto r; vector mode regresses Q(s) onto full reward vectors.
// Accumulates grads into q.net and returns the batch loss.
struct QBatch {
    std::vector<Tensor> states;
    std::vector<ActionValue> actions;     // scalar mode
    std::vector<double> rewards;          // scalar mode
    std::vector<Tensor> reward_vectors;   // vector mode
};
double one_step_q_loss(QFunction& q, const QBatch& batch);

// loss = -mean Q(s, pi(s)); gradients flow through the action input into pi
// only (Q grads are left untouched). pi must expose a deterministic
// differentiable action path: a Deterministic head or a Gaussian mean.
double deterministic_pg_loss(QFunction& q, PolicyHead& pi, std::span<const Tensor> states);

}  // namespace ndrl
