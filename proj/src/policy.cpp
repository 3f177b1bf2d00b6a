#include "ndrl/policy.hpp"

#include <algorithm>
#include <cmath>

#include "ndrl/losses.hpp"

namespace ndrl {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

double clamp_log_std(double raw) {
    return std::clamp(raw, PolicyHead::kLogStdMin, PolicyHead::kLogStdMax);
}

double clamp_mask(double raw) {
    return (raw > PolicyHead::kLogStdMin && raw < PolicyHead::kLogStdMax) ? 1.0 : 0.0;
}

}  // namespace

PolicyHead::PolicyHead(PolicyKind kind, Mlp trunk, int action_count_or_dim)
    : kind_(kind), trunk_(std::move(trunk)), n_(action_count_or_dim) {
    if (n_ < 1) throw ConfigError("policy head needs a positive action count/dim");
    int want = 0;
    switch (kind_) {
        case PolicyKind::Categorical: want = n_; break;
        case PolicyKind::DiagonalGaussian:
        case PolicyKind::TanhGaussian: want = 2 * n_; break;
        case PolicyKind::Deterministic: want = n_; break;
    }
    if (trunk_.output_dim() != want) {
        throw DimensionError("policy trunk output dim " + std::to_string(trunk_.output_dim()) +
                             " does not match head requirement " + std::to_string(want));
    }
}

void PolicyHead::check_state_dim(const Tensor& state) const {
    if (static_cast<int>(state.numel()) != trunk_.input_dim()) {
        throw DimensionError("policy state dim " + std::to_string(state.numel()) +
                             " does not match trunk input " + std::to_string(trunk_.input_dim()));
    }
}

PolicyHead::GaussView PolicyHead::gauss_view(std::span<const double> trunk_out) const {
    GaussView v;
    v.mean.assign(trunk_out.begin(), trunk_out.begin() + n_);
    v.log_std_raw.assign(trunk_out.begin() + n_, trunk_out.end());
    v.log_std.resize(static_cast<std::size_t>(n_));
    v.sigma.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
        v.log_std[static_cast<std::size_t>(i)] = clamp_log_std(v.log_std_raw[static_cast<std::size_t>(i)]);
        v.sigma[static_cast<std::size_t>(i)] = std::exp(v.log_std[static_cast<std::size_t>(i)]);
    }
    return v;
}

PolicySample PolicyHead::sample(const Tensor& state, Rng& rng) const {
    if (kind_ == PolicyKind::Deterministic) {
        throw UnsupportedError("deterministic head cannot sample; use act_greedy");
    }
    std::vector<double> noise;
    if (kind_ == PolicyKind::Categorical) {
        noise.push_back(rng.uniform01());
    } else {
        noise = rng.normal_vec(static_cast<std::size_t>(n_));
    }
    return sample_given_noise(state, noise);
}

PolicySample PolicyHead::sample_given_noise(const Tensor& state,
                                            std::span<const double> noise) const {
    check_state_dim(state);
    PolicySample s;
    Tensor out = trunk_.forward(state, s.cache);

    switch (kind_) {
        case PolicyKind::Deterministic:
            throw UnsupportedError("deterministic head cannot sample; use act_greedy");
        case PolicyKind::Categorical: {
            if (noise.size() != 1) throw DimensionError("categorical sampling needs one uniform draw");
            s.probs = softmax(out.data);
            double u = noise[0];
            double cum = 0.0;
            int pick = n_ - 1;
            for (int i = 0; i < n_; ++i) {
                cum += s.probs[static_cast<std::size_t>(i)];
                if (u < cum) {
                    pick = i;
                    break;
                }
            }
            s.action = ActionValue::discrete(pick);
            s.log_prob = std::log(std::max(s.probs[static_cast<std::size_t>(pick)], 1e-300));
            return s;
        }
        case PolicyKind::DiagonalGaussian:
        case PolicyKind::TanhGaussian: {
            if (static_cast<int>(noise.size()) != n_) {
                throw DimensionError("gaussian sampling needs one noise value per dimension");
            }
            GaussView v = gauss_view(out.data);
            s.mean = v.mean;
            s.log_std = v.log_std;
            s.log_std_raw = v.log_std_raw;
            s.sigma = v.sigma;
            s.xi.assign(noise.begin(), noise.end());
            s.pre_squash.resize(static_cast<std::size_t>(n_));
            std::vector<double> a(static_cast<std::size_t>(n_));
            double logp = 0.0;
            for (int i = 0; i < n_; ++i) {
                auto k = static_cast<std::size_t>(i);
                double u = v.mean[k] + v.sigma[k] * s.xi[k];
                s.pre_squash[k] = u;
                logp += -0.5 * kLog2Pi - v.log_std[k] - 0.5 * s.xi[k] * s.xi[k];
                if (kind_ == PolicyKind::TanhGaussian) {
                    double t = std::tanh(u);
                    logp -= std::log(1.0 - t * t + kTanhEps);
                    // strictly inside (-1, 1)
                    a[k] = std::clamp(t, -1.0 + 1e-12, 1.0 - 1e-12);
                } else {
                    a[k] = u;
                }
            }
            s.action = ActionValue::continuous(std::move(a));
            s.log_prob = logp;
            return s;
        }
    }
    throw UnsupportedError("unreachable policy kind");
}

double PolicyHead::log_prob(const Tensor& state, const ActionValue& action) const {
    MlpCache cache;
    return log_prob_cached(state, action, cache);
}

double PolicyHead::log_prob_cached(const Tensor& state, const ActionValue& action,
                                   MlpCache& cache) const {
    check_state_dim(state);
    Tensor out = trunk_.forward(state, cache);
    switch (kind_) {
        case PolicyKind::Deterministic:
            throw UnsupportedError("deterministic head has no density");
        case PolicyKind::Categorical: {
            int a = action.index();
            if (a < 0 || a >= n_) throw IndexError("categorical action out of range");
            return log_softmax(out.data)[static_cast<std::size_t>(a)];
        }
        case PolicyKind::DiagonalGaussian:
        case PolicyKind::TanhGaussian: {
            const auto& a = action.vec();
            if (static_cast<int>(a.size()) != n_) {
                throw DimensionError("action dim does not match gaussian head");
            }
            GaussView v = gauss_view(out.data);
            double logp = 0.0;
            for (int i = 0; i < n_; ++i) {
                auto k = static_cast<std::size_t>(i);
                double u = a[k];
                if (kind_ == PolicyKind::TanhGaussian) {
                    if (a[k] <= -1.0 || a[k] >= 1.0) {
                        throw DomainError("tanh-gaussian log_prob needs |action| < 1");
                    }
                    u = std::atanh(a[k]);
                }
                double z = (u - v.mean[k]) / v.sigma[k];
                logp += -0.5 * kLog2Pi - v.log_std[k] - 0.5 * z * z;
                if (kind_ == PolicyKind::TanhGaussian) {
                    double t = std::tanh(u);
                    logp -= std::log(1.0 - t * t + kTanhEps);
                }
            }
            return logp;
        }
    }
    throw UnsupportedError("unreachable policy kind");
}

double PolicyHead::entropy(const Tensor& state, Rng* rng) const {
    switch (kind_) {
        case PolicyKind::Deterministic:
            throw UnsupportedError("deterministic head has no entropy");
        case PolicyKind::Categorical: {
            std::vector<double> p = probs(state);
            double h = 0.0;
            for (double v : p) {
                if (v > 0.0) h -= v * std::log(v);
            }
            return h;
        }
        case PolicyKind::DiagonalGaussian: {
            check_state_dim(state);
            Tensor out = trunk_.forward(state);
            GaussView v = gauss_view(out.data);
            double h = 0.0;
            for (int i = 0; i < n_; ++i) {
                h += 0.5 * (kLog2Pi + 1.0) + v.log_std[static_cast<std::size_t>(i)];
            }
            return h;
        }
        case PolicyKind::TanhGaussian: {
            // no closed form; one-sample estimate -log pi(a), a ~ pi
            if (!rng) throw ConfigError("tanh-gaussian entropy is a sampled estimate; pass an rng");
            PolicySample s = sample(state, *rng);
            return -s.log_prob;
        }
    }
    throw UnsupportedError("unreachable policy kind");
}

ActionValue PolicyHead::act_greedy(const Tensor& state) const {
    check_state_dim(state);
    Tensor out = trunk_.forward(state);
    switch (kind_) {
        case PolicyKind::Categorical: {
            std::vector<double> p = softmax(out.data);
            int best = 0;
            for (int i = 1; i < n_; ++i) {
                if (p[static_cast<std::size_t>(i)] > p[static_cast<std::size_t>(best)]) best = i;
            }
            return ActionValue::discrete(best);  // ties break toward the lowest index
        }
        case PolicyKind::DiagonalGaussian: {
            GaussView v = gauss_view(out.data);
            return ActionValue::continuous(std::move(v.mean));
        }
        case PolicyKind::TanhGaussian: {
            GaussView v = gauss_view(out.data);
            std::vector<double> a(static_cast<std::size_t>(n_));
            for (int i = 0; i < n_; ++i) a[static_cast<std::size_t>(i)] = std::tanh(v.mean[static_cast<std::size_t>(i)]);
            return ActionValue::continuous(std::move(a));
        }
        case PolicyKind::Deterministic:
            return ActionValue::continuous(out.data);
    }
    throw UnsupportedError("unreachable policy kind");
}

std::vector<double> PolicyHead::probs(const Tensor& state) const {
    if (kind_ != PolicyKind::Categorical) throw UnsupportedError("probs: categorical heads only");
    check_state_dim(state);
    Tensor out = trunk_.forward(state);
    return softmax(out.data);
}

std::vector<double> PolicyHead::backward_reparam(const PolicySample& s,
                                                 std::span<const double> d_action,
                                                 double d_logprob) {
    if (kind_ != PolicyKind::DiagonalGaussian && kind_ != PolicyKind::TanhGaussian) {
        throw UnsupportedError("backward_reparam: gaussian heads only");
    }
    if (static_cast<int>(d_action.size()) != n_) {
        throw DimensionError("backward_reparam: d_action dim mismatch");
    }
    std::vector<double> g_out(static_cast<std::size_t>(2 * n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        auto k = static_cast<std::size_t>(i);
        double mask = clamp_mask(s.log_std_raw[k]);
        double dsig_dlraw = s.sigma[k] * s.xi[k] * mask;  // du/dlog_std_raw
        if (kind_ == PolicyKind::TanhGaussian) {
            double t = std::tanh(s.pre_squash[k]);
            double sech2 = 1.0 - t * t;
            double da_du = sech2;
            double dlogp_du = 2.0 * t * sech2 / (sech2 + kTanhEps);
            g_out[k] += d_action[k] * da_du + d_logprob * dlogp_du;
            g_out[static_cast<std::size_t>(n_) + k] +=
                d_action[k] * da_du * dsig_dlraw +
                d_logprob * (-1.0 * mask + dlogp_du * dsig_dlraw);
        } else {
            g_out[k] += d_action[k];
            g_out[static_cast<std::size_t>(n_) + k] +=
                d_action[k] * dsig_dlraw + d_logprob * (-1.0 * mask);
        }
    }
    return trunk_.backward(s.cache, g_out);
}

std::vector<double> PolicyHead::backward_log_prob(const MlpCache& cache, const ActionValue& action,
                                                  double d_logprob) {
    if (!cache.valid) throw StateError("backward_log_prob: missing trunk cache");
    const std::vector<double>& out = cache.post.back();
    switch (kind_) {
        case PolicyKind::Deterministic:
            throw UnsupportedError("deterministic head has no density");
        case PolicyKind::Categorical: {
            int a = action.index();
            std::vector<double> p = softmax(out);
            std::vector<double> g(p.size());
            for (std::size_t i = 0; i < p.size(); ++i) g[i] = d_logprob * (-p[i]);
            g[static_cast<std::size_t>(a)] += d_logprob;
            return trunk_.backward(cache, g);
        }
        case PolicyKind::DiagonalGaussian:
        case PolicyKind::TanhGaussian: {
            const auto& a = action.vec();
            GaussView v = gauss_view(out);
            std::vector<double> g(static_cast<std::size_t>(2 * n_), 0.0);
            for (int i = 0; i < n_; ++i) {
                auto k = static_cast<std::size_t>(i);
                double u = (kind_ == PolicyKind::TanhGaussian) ? std::atanh(std::clamp(a[k], -1.0 + 1e-12, 1.0 - 1e-12))
                                                               : a[k];
                double z = (u - v.mean[k]) / v.sigma[k];
                g[k] = d_logprob * z / v.sigma[k];
                g[static_cast<std::size_t>(n_) + k] =
                    d_logprob * (z * z - 1.0) * clamp_mask(v.log_std_raw[k]);
            }
            return trunk_.backward(cache, g);
        }
    }
    throw UnsupportedError("unreachable policy kind");
}

std::vector<double> PolicyHead::backward_sum_p_log_p(const MlpCache& cache, double d_out) {
    if (kind_ != PolicyKind::Categorical) {
        throw UnsupportedError("backward_sum_p_log_p: categorical heads only");
    }
    if (!cache.valid) throw StateError("backward_sum_p_log_p: missing trunk cache");
    std::vector<double> p = softmax(cache.post.back());
    // d(sum p log p)/dz_k = p_k (log p_k - sum_i p_i log p_i)
    double sum_plogp = 0.0;
    for (double v : p) {
        if (v > 0.0) sum_plogp += v * std::log(v);
    }
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        double logp = p[i] > 0.0 ? std::log(p[i]) : 0.0;
        g[i] = d_out * p[i] * (logp - sum_plogp);
    }
    return trunk_.backward(cache, g);
}

// ---------------- ExplorationSchedule ----------------

double ExplorationSchedule::epsilon() const {
    double frac = decay_steps <= 0
                      ? 1.0
                      : std::min(1.0, static_cast<double>(step_count) / static_cast<double>(decay_steps));
    if (decay == Decay::Linear) return start + (end - start) * frac;
    if (start <= 0.0 || end <= 0.0) throw ConfigError("exponential decay needs positive start/end");
    return start * std::pow(end / start, frac);
}

ActionValue ExplorationSchedule::explore(const ActionValue& greedy, const ActionKind& space,
                                         Rng& rng) {
    if (kind == Kind::EpsilonGreedy) {
        if (!space.is_discrete() || !greedy.is_discrete()) {
            throw ConfigError("epsilon-greedy exploration needs a discrete action space");
        }
        double eps = epsilon();
        ++step_count;
        double u = rng.uniform01();
        if (u < eps) return ActionValue::discrete(rng.uniform_int(space.count));
        return greedy;
    }
    if (space.is_discrete() || greedy.is_discrete()) {
        throw ConfigError("gaussian-noise exploration needs a continuous action space");
    }
    if (sigma < 0.0) throw ConfigError("noise sigma must be nonnegative");
    ++step_count;
    std::vector<double> a = greedy.vec();
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] = std::clamp(a[i] + sigma * rng.normal(), space.low[i], space.high[i]);
    }
    return ActionValue::continuous(std::move(a));
}

}  // namespace ndrl
