#include "ndrl/value.hpp"

#include <algorithm>
#include <cmath>

#include "ndrl/losses.hpp"

namespace ndrl {

QFunction QFunction::discrete(Mlp net, int n_actions) {
    if (net.output_dim() != n_actions) {
        throw DimensionError("discrete Q: net output " + std::to_string(net.output_dim()) +
                             " != action count " + std::to_string(n_actions));
    }
    return {std::move(net), QInputMode::StateToAllActions, n_actions, 0};
}

QFunction QFunction::continuous(Mlp net, int action_dim) {
    if (net.output_dim() != 1) throw DimensionError("continuous Q must have scalar output");
    return {std::move(net), QInputMode::StateActionToScalar, 0, action_dim};
}

QFunction QFunction::tabular(int n_states, int n_actions) {
    Rng rng(0);
    Mlp net = Mlp::make({n_states, n_actions}, Activation::Identity, Activation::Identity, rng);
    std::fill(net.weights[0].begin(), net.weights[0].end(), 0.0);
    std::fill(net.biases[0].begin(), net.biases[0].end(), 0.0);
    return discrete(std::move(net), n_actions);
}

Tensor QFunction::q_all(const Tensor& state) const {
    if (mode != QInputMode::StateToAllActions) {
        throw DimensionError("q_all requires StateToAllActions mode");
    }
    return net.forward(state);
}

int QFunction::argmax_action(const Tensor& state) const {
    Tensor q = q_all(state);
    int best = 0;
    for (int a = 1; a < n_actions; ++a) {
        if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
    }
    return best;
}

double QFunction::max_q(const Tensor& state) const {
    Tensor q = q_all(state);
    return *std::max_element(q.data.begin(), q.data.end());
}

double QFunction::q_sa(const Tensor& state, std::span<const double> action) const {
    if (mode != QInputMode::StateActionToScalar) {
        throw DimensionError("q_sa requires StateActionToScalar mode");
    }
    std::vector<double> input(state.data);
    input.insert(input.end(), action.begin(), action.end());
    return net.forward(Tensor::vec(std::move(input)))[0];
}

double QFunction::q_sa_cached(const Tensor& state, std::span<const double> action,
                              MlpCache& cache) const {
    if (mode != QInputMode::StateActionToScalar) {
        throw DimensionError("q_sa requires StateActionToScalar mode");
    }
    std::vector<double> input(state.data);
    input.insert(input.end(), action.begin(), action.end());
    return net.forward(Tensor::vec(std::move(input)), cache)[0];
}

TargetNetwork TargetNetwork::polyak(const QFunction& online, double tau) {
    TargetNetwork t;
    t.q = online;
    t.mode = Mode::Polyak;
    t.tau = tau;
    return t;
}

TargetNetwork TargetNetwork::hard_copy(const QFunction& online, int period) {
    TargetNetwork t;
    t.q = online;
    t.mode = Mode::HardCopy;
    t.period = period;
    return t;
}

void TargetNetwork::update(const QFunction& online) {
    if (mode == Mode::Polyak) {
        q.net.polyak_from(online.net, tau);
        ++counter;
        return;
    }
    ++counter;
    if (counter % period == 0) q.net.copy_from(online.net);
}

DiscountedHorizon::DiscountedHorizon(double g) : gamma(g) {
    if (g < 0.0 || g > 1.0) throw ConfigError("discount factor must lie in [0, 1]");
}

namespace {

double double_q_bootstrap(const QFunction& q_online, const QFunction& q_tgt, const Tensor& s_next) {
    int pick = q_online.argmax_action(s_next);
    return q_tgt.q_all(s_next)[static_cast<std::size_t>(pick)];
}

}  // namespace

double td0_target(const QFunction& q_tgt, double r, const Tensor& s_next, bool done, double gamma) {
    if (done) return r;
    return r + gamma * q_tgt.max_q(s_next);
}

double double_q_target(const QFunction& q_online, const QFunction& q_tgt, double r,
                       const Tensor& s_next, bool done, double gamma) {
    if (done) return r;
    return r + gamma * double_q_bootstrap(q_online, q_tgt, s_next);
}

double twin_q_target(const QFunction& q1_tgt, const QFunction& q2_tgt, const PolicyHead& pi,
                     double r, const Tensor& s_next, bool done, double gamma, Rng* rng) {
    if (done) return r;
    ActionValue a = rng ? pi.sample(s_next, *rng).action : pi.act_greedy(s_next);
    const auto& av = a.vec();
    double boot = std::min(q1_tgt.q_sa(s_next, av), q2_tgt.q_sa(s_next, av));
    return r + gamma * boot;
}

double nstep_q_target(const QFunction& q_tgt, const QFunction& q_online,
                      std::span<const double> rewards, const Tensor& s_end, bool done_within,
                      double gamma, int n) {
    if (n < 1) throw ConfigError("n-step target needs n >= 1");
    if (rewards.empty()) throw ConfigError("n-step target needs at least one reward");
    std::size_t m = std::min(rewards.size(), static_cast<std::size_t>(n));
    double sum = 0.0;
    double g = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        sum += g * rewards[i];
        g *= gamma;
    }
    if (done_within) return sum;
    return sum + g * double_q_bootstrap(q_online, q_tgt, s_end);
}

double one_step_q_loss(QFunction& q, const QBatch& batch) {
    if (batch.states.empty()) throw ConfigError("one_step_q_loss: empty batch");
    bool vector_mode = !batch.reward_vectors.empty();
    if (vector_mode && (!batch.actions.empty() || !batch.rewards.empty())) {
        throw DimensionError("one_step_q_loss: pass either (actions, rewards) or reward_vectors");
    }
    double n = static_cast<double>(batch.states.size());
    double total = 0.0;
    if (vector_mode) {
        if (q.mode != QInputMode::StateToAllActions) {
            throw DimensionError("vector-mode loss needs a StateToAllActions Q");
        }
        if (batch.reward_vectors.size() != batch.states.size()) {
            throw DimensionError("one_step_q_loss: reward vector count mismatch");
        }
        for (std::size_t i = 0; i < batch.states.size(); ++i) {
            MlpCache cache;
            Tensor pred = q.net.forward(batch.states[i], cache);
            LossResult l = mse_loss(pred, batch.reward_vectors[i]);
            total += l.value;
            for (double& gv : l.grad.data) gv /= n;
            q.net.backward(cache, l.grad.data);
        }
        return total / n;
    }
    if (batch.actions.size() != batch.states.size() || batch.rewards.size() != batch.states.size()) {
        throw DimensionError("one_step_q_loss: actions/rewards length mismatch");
    }
    for (std::size_t i = 0; i < batch.states.size(); ++i) {
        MlpCache cache;
        double pred;
        if (q.mode == QInputMode::StateToAllActions) {
            Tensor all = q.net.forward(batch.states[i], cache);
            int a = batch.actions[i].index();
            if (a < 0 || a >= q.n_actions) throw IndexError("one_step_q_loss: action out of range");
            pred = all[static_cast<std::size_t>(a)];
            double d = pred - batch.rewards[i];
            total += d * d;
            std::vector<double> g(static_cast<std::size_t>(q.n_actions), 0.0);
            g[static_cast<std::size_t>(a)] = 2.0 * d / n;
            q.net.backward(cache, g);
        } else {
            pred = q.q_sa_cached(batch.states[i], batch.actions[i].vec(), cache);
            double d = pred - batch.rewards[i];
            total += d * d;
            std::vector<double> g{2.0 * d / n};
            q.net.backward(cache, g);
        }
    }
    return total / n;
}

double deterministic_pg_loss(QFunction& q, PolicyHead& pi, std::span<const Tensor> states) {
    if (q.mode != QInputMode::StateActionToScalar) {
        throw ConfigError("deterministic policy gradient needs a StateActionToScalar Q");
    }
    if (pi.kind() == PolicyKind::Categorical) {
        throw ConfigError("deterministic policy gradient needs a differentiable action path");
    }
    if (states.empty()) throw ConfigError("deterministic_pg_loss: empty state batch");
    double n = static_cast<double>(states.size());
    double total = 0.0;
    for (const Tensor& s : states) {
        MlpCache pi_cache;
        Tensor trunk_out = pi.trunk().forward(s, pi_cache);
        int dim = pi.action_dim();
        std::vector<double> action(static_cast<std::size_t>(dim));
        std::vector<double> da_dout(static_cast<std::size_t>(dim), 1.0);  // d action / d trunk-mean
        for (int i = 0; i < dim; ++i) {
            double mu = trunk_out[static_cast<std::size_t>(i)];
            if (pi.kind() == PolicyKind::TanhGaussian) {
                double t = std::tanh(mu);
                action[static_cast<std::size_t>(i)] = t;
                da_dout[static_cast<std::size_t>(i)] = 1.0 - t * t;
            } else {
                action[static_cast<std::size_t>(i)] = mu;
            }
        }
        MlpCache q_cache;
        double qv = q.q_sa_cached(s, action, q_cache);
        total += -qv;
        std::vector<double> dq{-1.0 / n};
        std::vector<double> dinput = q.net.backward(q_cache, dq, /*accumulate_params=*/false);
        // slice the action part of the (s, a) input gradient
        std::size_t sdim = s.numel();
        std::vector<double> g_out(static_cast<std::size_t>(pi.trunk().output_dim()), 0.0);
        for (int i = 0; i < dim; ++i) {
            g_out[static_cast<std::size_t>(i)] =
                dinput[sdim + static_cast<std::size_t>(i)] * da_dout[static_cast<std::size_t>(i)];
        }
        pi.trunk().backward(pi_cache, g_out);
    }
    return total / n;
}

}  // namespace ndrl
