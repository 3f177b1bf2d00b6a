#include "ndrl/onpolicy.hpp"

#include <cmath>

#include "ndrl/losses.hpp"

namespace ndrl {

ValueFunction ValueFunction::make(const std::vector<int>& hidden, int state_dim, Rng& rng) {
    std::vector<int> sizes{state_dim};
    sizes.insert(sizes.end(), hidden.begin(), hidden.end());
    sizes.push_back(1);
    return ValueFunction{Mlp::make(sizes, Activation::Tanh, Activation::Identity, rng)};
}

double ValueFunction::value(const Tensor& state) const { return net.forward(state)[0]; }

namespace {

void check_index(const EpisodeTrace& trace, std::size_t t) {
    if (trace.steps.empty()) throw StateError("empty episode trace");
    if (t >= trace.steps.size()) {
        throw IndexError("trace index " + std::to_string(t) + " out of range for length " +
                         std::to_string(trace.steps.size()));
    }
}

// Bootstrap value after the final step: V(s_N) for truncated episodes, 0 for
// true terminals.
double tail_value(const EpisodeTrace& trace, const ValueFunction& v) {
    if (!trace.truncated) return 0.0;
    if (trace.final_state.numel() == 0) {
        throw StateError("truncated trace needs the bootstrap state");
    }
    return v.value(trace.final_state);
}

}  // namespace

double mc_return(const EpisodeTrace& trace, std::size_t t) {
    check_index(trace, t);
    double sum = 0.0;
    for (std::size_t i = t; i < trace.steps.size(); ++i) sum += trace.steps[i].reward;
    return sum;
}

double discounted_return(const EpisodeTrace& trace, std::size_t t, double gamma) {
    check_index(trace, t);
    double sum = 0.0;
    double g = 1.0;
    for (std::size_t i = t; i < trace.steps.size(); ++i) {
        sum += g * trace.steps[i].reward;
        g *= gamma;
    }
    return sum;
}

double nstep_return_v(const EpisodeTrace& trace, std::size_t t, int n, const ValueFunction& v,
                      double gamma) {
    check_index(trace, t);
    if (n < 1) throw ConfigError("n-step return needs n >= 1");
    std::size_t N = trace.steps.size();
    std::size_t m = std::min(static_cast<std::size_t>(n), N - t);
    double sum = 0.0;
    double g = 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        sum += g * trace.steps[t + i].reward;
        g *= gamma;
    }
    if (t + m < N) return sum + g * v.value(trace.steps[t + m].state);
    return sum + g * tail_value(trace, v);
}

std::vector<double> lambda_returns_all(const EpisodeTrace& trace, double lambda,
                                       const ValueFunction& v, double gamma) {
    if (trace.steps.empty()) throw StateError("empty episode trace");
    if (lambda < 0.0 || lambda > 1.0) throw ConfigError("lambda must lie in [0, 1]");
    std::size_t N = trace.steps.size();
    std::vector<double> g(N);
    double tail = tail_value(trace, v);
    g[N - 1] = trace.steps[N - 1].reward + gamma * tail;
    for (std::size_t i = N - 1; i-- > 0;) {
        double v_next = v.value(trace.steps[i + 1].state);
        g[i] = trace.steps[i].reward + gamma * ((1.0 - lambda) * v_next + lambda * g[i + 1]);
    }
    return g;
}

double lambda_return(const EpisodeTrace& trace, std::size_t t, double lambda,
                     const ValueFunction& v, double gamma) {
    check_index(trace, t);
    return lambda_returns_all(trace, lambda, v, gamma)[t];
}

double value_loss(ValueFunction& v, std::span<const Tensor> states,
                  std::span<const double> targets) {
    if (states.size() != targets.size() || states.empty()) {
        throw DimensionError("value_loss: states/targets length mismatch or empty");
    }
    double n = static_cast<double>(states.size());
    double total = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i) {
        MlpCache cache;
        double pred = v.net.forward(states[i], cache)[0];
        double d = pred - targets[i];
        total += d * d;
        std::vector<double> g{2.0 * d / n};
        v.net.backward(cache, g);
    }
    return total / n;
}

double advantage_td0(const EpisodeTrace& trace, std::size_t t, const ValueFunction& v,
                     double gamma) {
    check_index(trace, t);
    std::size_t N = trace.steps.size();
    double v_next = (t + 1 < N) ? v.value(trace.steps[t + 1].state) : tail_value(trace, v);
    return trace.steps[t].reward + gamma * v_next - v.value(trace.steps[t].state);
}

std::vector<double> gae_core(std::span<const double> rewards, std::span<const double> values,
                             double v_end, double gamma, double lambda) {
    if (rewards.size() != values.size()) throw DimensionError("gae_core: length mismatch");
    std::vector<double> adv(rewards.size());
    double running = 0.0;
    for (std::size_t i = rewards.size(); i-- > 0;) {
        double v_next = (i + 1 < rewards.size()) ? values[i + 1] : v_end;
        double delta = rewards[i] + gamma * v_next - values[i];
        running = delta + gamma * lambda * running;
        adv[i] = running;
    }
    return adv;
}

std::vector<double> gae(const EpisodeTrace& trace, double lambda, const ValueFunction& v,
                        double gamma) {
    if (trace.steps.empty()) throw StateError("empty episode trace");
    std::vector<double> rewards(trace.steps.size());
    std::vector<double> values(trace.steps.size());
    for (std::size_t i = 0; i < trace.steps.size(); ++i) {
        rewards[i] = trace.steps[i].reward;
        values[i] = v.value(trace.steps[i].state);
    }
    return gae_core(rewards, values, tail_value(trace, v), gamma, lambda);
}

double reinforce_loss(PolicyHead& pi, std::span<const ReinforceRow> rows) {
    if (rows.empty()) throw ConfigError("reinforce_loss: empty batch");
    double n = static_cast<double>(rows.size());
    double total = 0.0;
    for (const ReinforceRow& row : rows) {
        double w = row.objective - row.baseline;
        MlpCache cache;
        double logp = pi.log_prob_cached(row.state, row.action, cache);
        total += -logp * w;
        pi.backward_log_prob(cache, row.action, -w / n);
    }
    return total / n;
}

double importance_weight(double log_prob_now, double log_prob_behavior,
                         std::uint64_t* explosion_counter) {
    if (!std::isfinite(log_prob_now) || !std::isfinite(log_prob_behavior)) {
        throw DomainError("importance_weight: log probabilities must be finite");
    }
    double ratio = std::exp(log_prob_now - log_prob_behavior);
    if (explosion_counter && (ratio > 1e6 || ratio < 1e-6)) ++(*explosion_counter);
    return ratio;
}

}  // namespace ndrl
