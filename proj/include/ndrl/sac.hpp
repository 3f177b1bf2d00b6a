#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "ndrl/buffer.hpp"
#include "ndrl/env.hpp"
#include "ndrl/evaluate.hpp"
#include "ndrl/optim.hpp"
#include "ndrl/policy.hpp"
#include "ndrl/value.hpp"

namespace ndrl {

struct SacConfig {
    std::vector<int> hidden{32, 32};
    double gamma = 0.99;
    double tau = 0.995;       // Q' <- tau Q' + (1 - tau) Q per update
    double lr = 3e-4;         // all three losses
    double alpha_init = 0.2;
    // target entropy; defaults to -action_dim when unset
    std::optional<double> target_entropy;
    std::size_t buffer_capacity = 100000;
    int batch_size = 256;
    int warmup_steps = 1000;  // uniform random actions before learning
    int updates_per_step = 1;
    // Literal algorithm cadence: one update round per collected episode
    // instead of one per environment step.
    bool episode_cadence = false;
    bool bootstrap_on_truncation = true;
    std::int64_t total_env_steps = 30000;
    int eval_every = 5000;
    int eval_episodes = 20;
    double clip_norm = 10.0;
};

struct SacLogRow {
    std::int64_t env_steps = 0;
    std::int64_t grad_updates = 0;
    double loss_q1 = 0.0;
    double loss_q2 = 0.0;
    double loss_actor = 0.0;
    double alpha = 0.0;
    double entropy_estimate = 0.0;  // -mean log pi over the last actor update
    double train_return = 0.0;      // mean completed-episode return since last row
    int train_episodes = 0;
    double eval_mean = 0.0;
    double eval_std = 0.0;
    bool has_eval = false;
};

// Twin-critic soft actor-critic with a tanh-Gaussian actor and automatic
// temperature tuning. Continuous action spaces only.
class SacAgent {
public:
    SacAgent(const EnvSpec& spec, const SacConfig& cfg, std::uint64_t seed);

    PolicyHead& actor() { return actor_; }
    QFunction& q1() { return q1_; }
    QFunction& q2() { return q2_; }
    TargetNetwork& q1_target() { return q1_tgt_; }
    TargetNetwork& q2_target() { return q2_tgt_; }
    ReplayBuffer& buffer() { return buffer_; }
    Rng& rng() { return rng_; }

    double alpha() const;
    double log_alpha() const { return log_alpha_; }
    void set_log_alpha(double v) { log_alpha_ = v; }
    double target_entropy() const { return target_entropy_; }

    // y = r + gamma * (min_i Q'_i(s', a') - alpha * log pi(a'|s')), a' ~ pi;
    // terminal rows return r. Exposed for the oracle tests.
    double critic_target(const Transition& t, Rng& rng) const;

    std::pair<double, double> critic_update(std::span<const SampledTransition> batch);
    double actor_update(std::span<const SampledTransition> batch);
    double temperature_update(std::span<const SampledTransition> batch);  // returns alpha
    void target_update();

    double last_entropy_estimate() const { return last_entropy_estimate_; }
    std::int64_t grad_updates = 0;

private:
    SacConfig cfg_;
    int state_dim_ = 0;
    int action_dim_ = 0;
    double target_entropy_ = 0.0;
    PolicyHead actor_;
    QFunction q1_, q2_;
    TargetNetwork q1_tgt_, q2_tgt_;
    double log_alpha_ = 0.0;
    double log_alpha_grad_ = 0.0;
    AdamState actor_opt_, q1_opt_, q2_opt_, alpha_opt_;
    ReplayBuffer buffer_;
    Rng rng_;
    double last_entropy_estimate_ = 0.0;

    bool effective_done(const Transition& t) const;
};

// Full training loop: collect with pi, push, minibatch updates, Polyak
// targets. log_sink receives one row per eval interval; eval_hook can stop
// training early by returning true.
struct SacTrainResult {
    EvalReport final_eval;
    std::int64_t env_steps = 0;
    std::int64_t grad_updates = 0;
};
SacTrainResult sac_train(SacAgent& agent, Env& env, const SacConfig& cfg, std::uint64_t seed,
                         const std::function<void(const SacLogRow&)>& log_sink = nullptr,
                         const std::function<bool(const EvalReport&)>& eval_hook = nullptr);

}  // namespace ndrl
