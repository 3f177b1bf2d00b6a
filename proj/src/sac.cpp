#include "ndrl/sac.hpp"

#include <algorithm>
#include <cmath>

namespace ndrl {

SacAgent::SacAgent(const EnvSpec& spec, const SacConfig& cfg, std::uint64_t seed)
    : cfg_(cfg),
      state_dim_(spec.state_dim),
      action_dim_(spec.action.dim),
      buffer_(cfg.buffer_capacity),
      rng_(Rng::derive(seed, "sac.sample")) {
    if (spec.action.is_discrete()) {
        throw ConfigError("SAC here is continuous-only; discrete env rejected");
    }
    if (cfg_.alpha_init <= 0.0) throw ConfigError("alpha_init must be positive");
    target_entropy_ = cfg_.target_entropy.value_or(-static_cast<double>(action_dim_));
    log_alpha_ = std::log(cfg_.alpha_init);

    std::vector<int> actor_sizes{state_dim_};
    actor_sizes.insert(actor_sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    actor_sizes.push_back(2 * action_dim_);
    Rng actor_rng(Rng::derive(seed, "sac.actor"));
    actor_ = PolicyHead(PolicyKind::TanhGaussian,
                        Mlp::make(actor_sizes, Activation::Tanh, Activation::Identity, actor_rng),
                        action_dim_);

    std::vector<int> q_sizes{state_dim_ + action_dim_};
    q_sizes.insert(q_sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    q_sizes.push_back(1);
    Rng q1_rng(Rng::derive(seed, "sac.q1"));
    Rng q2_rng(Rng::derive(seed, "sac.q2"));  // independently initialized twin
    q1_ = QFunction::continuous(Mlp::make(q_sizes, Activation::Tanh, Activation::Identity, q1_rng),
                                action_dim_);
    q2_ = QFunction::continuous(Mlp::make(q_sizes, Activation::Tanh, Activation::Identity, q2_rng),
                                action_dim_);
    q1_tgt_ = TargetNetwork::polyak(q1_, cfg_.tau);
    q2_tgt_ = TargetNetwork::polyak(q2_, cfg_.tau);

    AdamConfig opt;
    opt.lr = cfg_.lr;
    opt.clip_norm = cfg_.clip_norm;
    actor_opt_ = AdamState(opt);
    q1_opt_ = AdamState(opt);
    q2_opt_ = AdamState(opt);
    alpha_opt_ = AdamState(opt);
}

double SacAgent::alpha() const { return std::exp(log_alpha_); }

bool SacAgent::effective_done(const Transition& t) const {
    return t.done && !(t.truncated && cfg_.bootstrap_on_truncation);
}

double SacAgent::critic_target(const Transition& t, Rng& rng) const {
    if (effective_done(t)) return t.reward;
    PolicySample next = actor_.sample(t.next_state, rng);
    const auto& a = next.action.vec();
    double qmin = std::min(q1_tgt_.q.q_sa(t.next_state, a), q2_tgt_.q.q_sa(t.next_state, a));
    return t.reward + cfg_.gamma * (qmin - alpha() * next.log_prob);
}

std::pair<double, double> SacAgent::critic_update(std::span<const SampledTransition> batch) {
    if (batch.empty()) throw ConfigError("sac critic update: empty minibatch");
    double n = static_cast<double>(batch.size());
    double loss1 = 0.0, loss2 = 0.0;
    for (const SampledTransition& row : batch) {
        const Transition& t = *row.transition;
        double y = critic_target(t, rng_);
        const auto& a = t.action.vec();
        MlpCache c1, c2;
        double p1 = q1_.q_sa_cached(t.state, a, c1);
        double p2 = q2_.q_sa_cached(t.state, a, c2);
        loss1 += (y - p1) * (y - p1);
        loss2 += (y - p2) * (y - p2);
        std::vector<double> g1{2.0 * (p1 - y) / n};
        std::vector<double> g2{2.0 * (p2 - y) / n};
        q1_.net.backward(c1, g1);
        q2_.net.backward(c2, g2);
    }
    q1_opt_.step(q1_.net.param_refs("q1"));
    q2_opt_.step(q2_.net.param_refs("q2"));
    ++grad_updates;
    return {loss1 / n, loss2 / n};
}

double SacAgent::actor_update(std::span<const SampledTransition> batch) {
    if (batch.empty()) throw ConfigError("sac actor update: empty minibatch");
    double n = static_cast<double>(batch.size());
    double loss = 0.0;
    double sum_logp = 0.0;
    double a_cur = alpha();
    for (const SampledTransition& row : batch) {
        const Transition& t = *row.transition;
        PolicySample s = actor_.sample(t.state, rng_);
        const auto& a = s.action.vec();
        MlpCache c1, c2;
        double v1 = q1_.q_sa_cached(t.state, a, c1);
        double v2 = q2_.q_sa_cached(t.state, a, c2);
        loss += a_cur * s.log_prob - std::min(v1, v2);
        sum_logp += s.log_prob;

        // gradient through the action into the min critic; critics frozen
        std::vector<double> dq{-1.0 / n};
        MlpCache& cmin = v1 <= v2 ? c1 : c2;
        QFunction& qmin = v1 <= v2 ? q1_ : q2_;
        std::vector<double> dinput = qmin.net.backward(cmin, dq, /*accumulate_params=*/false);
        std::vector<double> d_action(dinput.begin() + state_dim_, dinput.end());
        actor_.backward_reparam(s, d_action, a_cur / n);
    }
    actor_opt_.step(actor_.trunk().param_refs("actor"));
    last_entropy_estimate_ = -sum_logp / n;
    return loss / n;
}

double SacAgent::temperature_update(std::span<const SampledTransition> batch) {
    if (batch.empty()) throw ConfigError("sac temperature update: empty minibatch");
    double n = static_cast<double>(batch.size());
    double grad = 0.0;
    double a_cur = alpha();
    for (const SampledTransition& row : batch) {
        PolicySample s = actor_.sample(row.transition->state, rng_);
        // L_alpha = -alpha (log pi + target entropy), log pi constant
        grad += -a_cur * (s.log_prob + target_entropy_);
    }
    log_alpha_grad_ = grad / n;
    Mlp::TensorRef ref{"log_alpha", std::span<double>(&log_alpha_, 1),
                       std::span<double>(&log_alpha_grad_, 1), {1}};
    alpha_opt_.step({ref});
    return alpha();
}

void SacAgent::target_update() {
    q1_tgt_.update(q1_);
    q2_tgt_.update(q2_);
}

SacTrainResult sac_train(SacAgent& agent, Env& env, const SacConfig& cfg, std::uint64_t seed,
                         const std::function<void(const SacLogRow&)>& log_sink,
                         const std::function<bool(const EvalReport&)>& eval_hook) {
    EnvSpec spec = env.spec();
    if (spec.action.is_discrete()) throw ConfigError("sac_train needs a continuous-action env");
    Rng warmup_rng(Rng::derive(seed, "sac.warmup"));
    std::uint64_t eval_base = Rng::derive(seed, "sac.eval");
    auto eval_env = env.clone();
    auto greedy = [&agent](const Tensor& s) { return agent.actor().act_greedy(s); };

    SacTrainResult result;
    Tensor s = env.reset(Rng::derive(seed, "sac.env"));
    double episode_return = 0.0;
    double completed_sum = 0.0;
    int completed_count = 0;
    bool episode_just_ended = false;
    SacLogRow row;

    auto run_updates = [&](int rounds) {
        for (int u = 0; u < rounds; ++u) {
            if (agent.buffer().size() < static_cast<std::size_t>(cfg.batch_size)) return;
            auto batch = agent.buffer().sample_uniform(static_cast<std::size_t>(cfg.batch_size),
                                                       agent.rng());
            auto [l1, l2] = agent.critic_update(batch);
            row.loss_q1 = l1;
            row.loss_q2 = l2;
            row.loss_actor = agent.actor_update(batch);
            row.alpha = agent.temperature_update(batch);
            agent.target_update();
        }
    };

    for (std::int64_t step = 1; step <= cfg.total_env_steps; ++step) {
        ActionValue a;
        if (step <= cfg.warmup_steps) {
            std::vector<double> v(static_cast<std::size_t>(spec.action.dim));
            for (int i = 0; i < spec.action.dim; ++i) {
                v[static_cast<std::size_t>(i)] = warmup_rng.uniform(
                    spec.action.low[static_cast<std::size_t>(i)],
                    spec.action.high[static_cast<std::size_t>(i)]);
            }
            a = ActionValue::continuous(std::move(v));
        } else {
            a = agent.actor().sample(s, agent.rng()).action;
        }
        StepResult r = env.step(a);
        Transition t;
        t.state = s;
        t.action = a;
        t.reward = r.reward;
        t.next_state = r.next_state;
        t.done = r.done;
        t.truncated = r.truncated;
        agent.buffer().push(std::move(t));
        episode_return += r.reward;
        if (r.done) {
            completed_sum += episode_return;
            ++completed_count;
            episode_return = 0.0;
            s = env.reset();
            episode_just_ended = true;
        } else {
            s = r.next_state;
        }

        if (step > cfg.warmup_steps) {
            if (cfg.episode_cadence) {
                if (episode_just_ended) run_updates(cfg.updates_per_step);
            } else {
                run_updates(cfg.updates_per_step);
            }
        }
        episode_just_ended = false;

        if (cfg.eval_every > 0 && step % cfg.eval_every == 0) {
            EvalReport report = run_greedy_eval(*eval_env, greedy, cfg.eval_episodes, eval_base);
            row.env_steps = step;
            row.grad_updates = agent.grad_updates;
            row.entropy_estimate = agent.last_entropy_estimate();
            row.alpha = agent.alpha();
            row.train_return = completed_count ? completed_sum / completed_count : 0.0;
            row.train_episodes = completed_count;
            row.eval_mean = report.mean();
            row.eval_std = report.stddev();
            row.has_eval = true;
            if (log_sink) log_sink(row);
            completed_sum = 0.0;
            completed_count = 0;
            result.env_steps = step;
            if (eval_hook && eval_hook(report)) {
                result.final_eval = report;
                result.grad_updates = agent.grad_updates;
                return result;
            }
        }
    }
    result.final_eval = run_greedy_eval(*eval_env, greedy, cfg.eval_episodes, eval_base);
    result.env_steps = cfg.total_env_steps;
    result.grad_updates = agent.grad_updates;
    return result;
}

}  // namespace ndrl
