#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "ndrl/envs.hpp"
#include "ndrl/errors.hpp"
#include "ndrl/optim.hpp"
#include "ndrl/value.hpp"
#include "oracle_helpers.hpp"

using namespace ndrl;

namespace {

// Q(s, a) = -|a - 2| built exactly from two ReLU units; max at a = 2.
QFunction abs_peak_q() {
    Rng rng(0);
    Mlp net = Mlp::make({2, 2, 1}, Activation::ReLU, Activation::Identity, rng);
    net.weights[0] = {0.0, 1.0,   // z1 = a - 2
                      0.0, -1.0}; // z2 = 2 - a
    net.biases[0] = {-2.0, 2.0};
    net.weights[1] = {-1.0, -1.0};
    net.biases[1] = {0.0};
    return QFunction::continuous(std::move(net), 1);
}

QFunction table_from(const std::vector<std::vector<double>>& q) {
    int n_states = static_cast<int>(q.size());
    int n_actions = static_cast<int>(q[0].size());
    QFunction f = QFunction::tabular(n_states, n_actions);
    for (int s = 0; s < n_states; ++s) {
        for (int a = 0; a < n_actions; ++a) {
            f.net.weights[0][static_cast<std::size_t>(a * n_states + s)] = q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)];
        }
    }
    return f;
}

Tensor one_hot(int i, int n) {
    Tensor t = Tensor::zeros({static_cast<std::size_t>(n)});
    t[static_cast<std::size_t>(i)] = 1.0;
    return t;
}

}  // namespace

TEST_CASE("one_step_q_loss: zero loss at the fixed point, hand-computed batch mean") {
    QFunction q = table_from({{1.0, 2.0}, {3.0, 4.0}});
    QBatch perfect;
    perfect.states = {one_hot(0, 2), one_hot(1, 2)};
    perfect.actions = {ActionValue::discrete(1), ActionValue::discrete(0)};
    perfect.rewards = {2.0, 3.0};
    CHECK(one_step_q_loss(q, perfect) == doctest::Approx(0.0));
    q.net.zero_grads();

    QBatch batch;
    batch.states = {one_hot(0, 2), one_hot(1, 2)};
    batch.actions = {ActionValue::discrete(0), ActionValue::discrete(1)};
    batch.rewards = {0.5, 1.0};
    // hand arithmetic: ((1-0.5)^2 + (4-1)^2)/2
    CHECK(one_step_q_loss(q, batch) == doctest::Approx((0.25 + 9.0) / 2.0));
}

TEST_CASE("one_step_q_loss: vector mode regresses onto one-hot reward vectors") {
    // the one-hot representation of accuracy rewards: class 2 of 5
    Tensor target = Tensor::zeros({5});
    target[2] = 1.0;
    CHECK(target.data == std::vector<double>{0, 0, 1, 0, 0});

    Rng rng(3);
    Mlp net = Mlp::make({3, 8, 5}, Activation::Tanh, Activation::Identity, rng);
    QFunction q = QFunction::discrete(std::move(net), 5);
    AdamState adam(AdamConfig{.lr = 0.02});
    QBatch batch;
    batch.states = {Tensor::vec({0.1, 0.2, 0.3})};
    batch.reward_vectors = {target};
    double loss = 1.0;
    for (int i = 0; i < 500; ++i) {
        loss = one_step_q_loss(q, batch);
        adam.step(q.net.param_refs("q"));
    }
    CHECK(loss < 1e-4);
    CHECK(q.argmax_action(batch.states[0]) == 2);

    QBatch bad = batch;
    bad.actions = {ActionValue::discrete(0)};
    CHECK_THROWS_AS(one_step_q_loss(q, bad), DimensionError);
}

TEST_CASE("one_step_q_loss gradients match finite differences (scalar and vector)") {
    Rng rng(5);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Mlp net = Mlp::make({2, 5, 3}, Activation::Tanh, Activation::Identity, rng);
        QFunction q = QFunction::discrete(std::move(net), 3);
        QBatch batch;
        Rng drng(Rng::derive(seed, "qloss"));
        for (int i = 0; i < 4; ++i) {
            batch.states.push_back(Tensor::vec({drng.uniform(-1, 1), drng.uniform(-1, 1)}));
            batch.actions.push_back(ActionValue::discrete(drng.uniform_int(3)));
            batch.rewards.push_back(drng.uniform(0, 1));
        }
        q.net.zero_grads();
        one_step_q_loss(q, batch);
        auto eval = [&]() {
            QFunction probe = q;
            probe.net.zero_grads();
            QBatch copy = batch;
            return one_step_q_loss(probe, copy);
        };
        CHECK(oracle::check_grads(q.net.param_refs("q"), eval, 1e-4).ok(1e-4));
    }
}

TEST_CASE("td0_target: terminal and myopic reductions") {
    QFunction q = table_from({{5.0, -1.0}, {2.0, 7.0}});
    CHECK(td0_target(q, 3.0, one_hot(1, 2), true, 0.99) == 3.0);
    CHECK(td0_target(q, 0.5, one_hot(1, 2), false, 0.0) == 0.5);
    CHECK(td0_target(q, 0.5, one_hot(1, 2), false, 0.9) == doctest::Approx(0.5 + 0.9 * 7.0));
}

TEST_CASE("tabular Q-learning with td0_target converges to the value-iteration fixed point") {
    GridWorldConfig cfg;
    cfg.width = 4;
    cfg.height = 4;
    cfg.max_steps = 64;
    GridWorld env(cfg);
    auto model = *env.exact_model();
    double gamma = 0.99;
    auto vi = oracle::value_iteration(model, gamma, 1e-12);

    QFunction q = QFunction::tabular(model.n_states, model.n_actions);
    Rng rng(7);
    // epsilon = 1 exploration; lr = 1 updates are exact in a deterministic env
    for (int episode = 0; episode < 1500; ++episode) {
        int s = model.start_state;
        for (int t = 0; t < 64 && !model.is_terminal(s); ++t) {
            int a = rng.uniform_int(model.n_actions);
            int sn = model.next_state(s, a);
            double r = model.reward(s, a);
            double target = td0_target(q, r, model.encode(sn), model.is_terminal(sn), gamma);
            q.net.weights[0][static_cast<std::size_t>(a * model.n_states + s)] = target;
            s = sn;
        }
    }
    double sup = 0.0;
    for (int s = 0; s < model.n_states; ++s) {
        if (model.is_terminal(s)) continue;
        for (int a = 0; a < model.n_actions; ++a) {
            double got = q.q_all(model.encode(s))[static_cast<std::size_t>(a)];
            sup = std::max(sup, std::abs(got - vi.q[static_cast<std::size_t>(s)][static_cast<std::size_t>(a)]));
        }
    }
    CHECK(sup <= 1e-6);
}

TEST_CASE("double_q_target: identical networks reduce to td0; selection vs evaluation") {
    QFunction online = table_from({{1.0, 2.0}, {0.5, 0.2}});
    QFunction tgt = online;
    Tensor s = one_hot(1, 2);
    CHECK(double_q_target(online, tgt, 0.3, s, false, 0.9) ==
          td0_target(tgt, 0.3, s, false, 0.9));

    // online argmax at s' is action 1, target values [5, 2] -> bootstrap uses 2
    QFunction online2 = table_from({{0.0, 0.0}, {1.0, 9.0}});
    QFunction tgt2 = table_from({{0.0, 0.0}, {5.0, 2.0}});
    CHECK(double_q_target(online2, tgt2, 0.0, s, false, 1.0) == doctest::Approx(2.0));
}

TEST_CASE("double_q_target: negative bias relative to the max operator (Monte Carlo)") {
    Rng rng(11);
    double mean_double = 0.0, mean_max = 0.0;
    int trials = 10000;
    for (int t = 0; t < trials; ++t) {
        // true Q is zero; both estimators see independent noise
        std::vector<std::vector<double>> qo{{rng.normal(), rng.normal(), rng.normal()}};
        std::vector<std::vector<double>> qt{{rng.normal(), rng.normal(), rng.normal()}};
        QFunction online = table_from(qo);
        QFunction tgt = table_from(qt);
        Tensor s = one_hot(0, 1);
        mean_double += double_q_target(online, tgt, 0.0, s, false, 1.0);
        mean_max += td0_target(tgt, 0.0, s, false, 1.0);
    }
    mean_double /= trials;
    mean_max /= trials;
    CHECK(mean_double <= mean_max);
    CHECK(mean_max > 0.5);  // maximization bias is clearly positive here
}

TEST_CASE("twin_q_target: min of critics, terminal zeroing") {
    QFunction q1 = abs_peak_q();
    QFunction q2 = abs_peak_q();
    Rng rng(0);
    Mlp trunk = Mlp::make({1, 1}, Activation::Identity, Activation::Identity, rng);
    trunk.weights[0][0] = 0.0;
    trunk.biases[0][0] = 0.5;
    PolicyHead pi(PolicyKind::Deterministic, std::move(trunk), 1);
    Tensor s = Tensor::vec({0.0});

    double t_same = twin_q_target(q1, q2, pi, 1.0, s, false, 1.0);
    CHECK(t_same == doctest::Approx(1.0 + q1.q_sa(s, std::array{0.5})));

    // make q2 uniformly higher; min must stick with q1
    QFunction q2_hi = abs_peak_q();
    q2_hi.net.biases[1][0] = 3.0;
    CHECK(twin_q_target(q1, q2_hi, pi, 1.0, s, false, 1.0) == doctest::Approx(t_same));

    CHECK(twin_q_target(q1, q2, pi, 4.5, s, true, 1.0) == 4.5);
}

TEST_CASE("twin_q_target: arithmetic example r=1, gamma=1, critics 2 and 5") {
    // constant critics: Q1 = 2, Q2 = 5
    Rng rng(0);
    auto const_q = [&](double c) {
        Mlp net = Mlp::make({2, 1}, Activation::Identity, Activation::Identity, rng);
        std::fill(net.weights[0].begin(), net.weights[0].end(), 0.0);
        net.biases[0][0] = c;
        return QFunction::continuous(std::move(net), 1);
    };
    QFunction q1 = const_q(2.0), q2 = const_q(5.0);
    Mlp trunk = Mlp::make({1, 1}, Activation::Identity, Activation::Identity, rng);
    PolicyHead pi(PolicyKind::Deterministic, std::move(trunk), 1);
    CHECK(twin_q_target(q1, q2, pi, 1.0, Tensor::vec({0.0}), false, 1.0) == doctest::Approx(3.0));
}

TEST_CASE("nstep_q_target: reductions and loop oracle") {
    QFunction online = table_from({{0.1, 0.2}, {0.3, 0.4}, {0.5, 0.6}});
    QFunction tgt = table_from({{1.0, 0.9}, {0.8, 0.7}, {0.6, 0.5}});
    Tensor s_end = one_hot(2, 3);

    // n = 1 is double_q_target, bitwise
    std::array<double, 1> r1{0.77};
    CHECK(nstep_q_target(tgt, online, r1, s_end, false, 0.9, 1) ==
          double_q_target(online, tgt, 0.77, s_end, false, 0.9));

    // episode ended inside the window: pure discounted sum
    std::array<double, 3> rs{1.0, 2.0, 3.0};
    CHECK(nstep_q_target(tgt, online, rs, s_end, true, 0.5, 5) ==
          doctest::Approx(1.0 + 0.5 * 2.0 + 0.25 * 3.0));

    CHECK_THROWS_AS(nstep_q_target(tgt, online, rs, s_end, false, 0.9, 0), ConfigError);
}

TEST_CASE("nstep_q_target: random GridWorld segment matches a loop oracle") {
    GridWorldConfig cfg;
    cfg.width = 3;
    cfg.height = 3;
    GridWorld env(cfg);
    auto model = *env.exact_model();
    Rng rng(23);
    QFunction online = QFunction::tabular(model.n_states, model.n_actions);
    QFunction tgt = QFunction::tabular(model.n_states, model.n_actions);
    for (auto& w : online.net.weights[0]) w = rng.uniform(-1, 1);
    for (auto& w : tgt.net.weights[0]) w = rng.uniform(-1, 1);

    for (int trial = 0; trial < 50; ++trial) {
        int s = model.start_state;
        std::vector<double> rewards;
        bool done = false;
        for (int t = 0; t < 5 && !done; ++t) {
            int a = rng.uniform_int(4);
            rewards.push_back(model.reward(s, a));
            s = model.next_state(s, a);
            done = model.is_terminal(s);
        }
        int n = 3;
        double gamma = 0.9;
        std::size_t m = std::min(rewards.size(), static_cast<std::size_t>(n));
        bool done_within = done && rewards.size() <= static_cast<std::size_t>(n);
        std::vector<double> window(rewards.begin(), rewards.begin() + static_cast<long>(m));
        double got = nstep_q_target(tgt, online, window, model.encode(s), done_within, gamma, n);

        // loop oracle
        double want = 0.0;
        for (std::size_t i = 0; i < m; ++i) want += std::pow(gamma, static_cast<double>(i)) * window[i];
        if (!done_within) {
            Tensor se = model.encode(s);
            int pick = online.argmax_action(se);
            want += std::pow(gamma, static_cast<double>(m)) * tgt.q_all(se)[static_cast<std::size_t>(pick)];
        }
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("terminal correctness: every target returns exactly r when done") {
    QFunction q = table_from({{3.0, -2.0}});
    QFunction q2 = table_from({{8.0, 1.0}});
    Rng rng(0);
    Mlp trunk = Mlp::make({1, 1}, Activation::Identity, Activation::Identity, rng);
    PolicyHead pi(PolicyKind::Deterministic, std::move(trunk), 1);
    QFunction c1 = abs_peak_q(), c2 = abs_peak_q();
    Tensor s = one_hot(0, 1);
    Rng grng(9);
    for (int i = 0; i < 50; ++i) {
        double gamma = grng.uniform01();
        double r = grng.uniform(-5, 5);
        CHECK(td0_target(q, r, s, true, gamma) == r);
        CHECK(double_q_target(q, q2, r, s, true, gamma) == r);
        CHECK(twin_q_target(c1, c2, pi, r, Tensor::vec({0.0}), true, gamma) == r);
        std::array<double, 1> rr{r};
        CHECK(nstep_q_target(q, q2, rr, s, true, gamma, 1) == r);
    }
}

TEST_CASE("greedy-policy equivalence: adding a constant to all Q outputs keeps the argmax") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::vector<double>> rows{
            {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)}};
        QFunction q = table_from(rows);
        Tensor s = one_hot(0, 1);
        int base = q.argmax_action(s);
        QFunction shifted = q;
        for (auto& b : shifted.net.biases[0]) b += 17.5;
        CHECK(shifted.argmax_action(s) == base);
    }
}

TEST_CASE("update_target: polyak limits and two-step arithmetic") {
    QFunction online = table_from({{1.0, 1.0}});
    QFunction zero = table_from({{0.0, 0.0}});

    TargetNetwork t0 = TargetNetwork::polyak(zero, 0.0);
    t0.update(online);
    CHECK(t0.q.net.weights[0] == online.net.weights[0]);

    TargetNetwork t1 = TargetNetwork::polyak(zero, 1.0);
    t1.update(online);
    CHECK(t1.q.net.weights[0] == zero.net.weights[0]);

    TargetNetwork t = TargetNetwork::polyak(zero, 0.995);
    t.update(online);
    t.update(online);
    CHECK(t.q.net.weights[0][0] == doctest::Approx(1.0 - 0.995 * 0.995).epsilon(1e-12));
}

TEST_CASE("update_target: hard copy only every k steps") {
    QFunction online = table_from({{1.0, 1.0}});
    QFunction zero = table_from({{0.0, 0.0}});
    TargetNetwork t = TargetNetwork::hard_copy(zero, 3);
    t.update(online);
    CHECK(t.q.net.weights[0][0] == 0.0);
    t.update(online);
    CHECK(t.q.net.weights[0][0] == 0.0);
    t.update(online);  // third update copies
    CHECK(t.q.net.weights[0][0] == 1.0);
}

TEST_CASE("deterministic_pg_loss: constant-in-action Q gives zero policy gradient") {
    Rng rng(1);
    Mlp qnet = Mlp::make({2, 1}, Activation::Identity, Activation::Identity, rng);
    qnet.weights[0] = {0.8, 0.0};  // reads the state, ignores the action
    qnet.biases[0] = {0.4};
    QFunction q = QFunction::continuous(std::move(qnet), 1);
    Mlp trunk = Mlp::make({1, 1}, Activation::Identity, Activation::Identity, rng);
    PolicyHead pi(PolicyKind::Deterministic, std::move(trunk), 1);
    pi.trunk().zero_grads();
    std::vector<Tensor> states{Tensor::vec({0.5})};
    deterministic_pg_loss(q, pi, states);
    for (const auto& g : pi.trunk().weight_grads)
        for (double v : g) CHECK(v == 0.0);
}

TEST_CASE("deterministic_pg_loss: policy converges to the closed-form maximum a=2") {
    QFunction q = abs_peak_q();
    Rng rng(4);
    Mlp trunk = Mlp::make({1, 1}, Activation::Identity, Activation::Identity, rng);
    trunk.weights[0][0] = 0.0;
    trunk.biases[0][0] = 0.0;
    PolicyHead pi(PolicyKind::Deterministic, std::move(trunk), 1);
    AdamState adam(AdamConfig{.lr = 5e-3});
    std::vector<Tensor> states{Tensor::vec({1.0})};
    for (int i = 0; i < 4000; ++i) {
        deterministic_pg_loss(q, pi, states);
        adam.step(pi.trunk().param_refs("pi"));
    }
    CHECK(pi.act_greedy(states[0]).vec()[0] == doctest::Approx(2.0).epsilon(1e-2));
}

TEST_CASE("deterministic_pg_loss: gradient equals -dQ/da and matches finite differences") {
    Rng rng(6);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Mlp qnet = Mlp::make({3, 6, 1}, Activation::Tanh, Activation::Identity, rng);
        QFunction q = QFunction::continuous(std::move(qnet), 1);
        Mlp trunk = Mlp::make({2, 4, 1}, Activation::Tanh, Activation::Identity, rng);
        PolicyHead pi(PolicyKind::Deterministic, std::move(trunk), 1);
        Rng drng(Rng::derive(seed, "dpg"));
        std::vector<Tensor> states;
        for (int i = 0; i < 3; ++i) {
            states.push_back(Tensor::vec({drng.uniform(-1, 1), drng.uniform(-1, 1)}));
        }
        pi.trunk().zero_grads();
        deterministic_pg_loss(q, pi, states);
        auto eval = [&]() {
            double total = 0.0;
            for (const auto& s : states) {
                double a = pi.act_greedy(s).vec()[0];
                total += -q.q_sa(s, std::array{a});
            }
            return total / static_cast<double>(states.size());
        };
        CHECK(oracle::check_grads(pi.trunk().param_refs("pi"), eval, 1e-4).ok(1e-4));
        // Q grads must stay untouched
        for (const auto& g : q.net.weight_grads)
            for (double v : g) CHECK(v == 0.0);
    }
}

TEST_CASE("deterministic_pg_loss: categorical head is rejected") {
    Rng rng(2);
    Mlp qnet = Mlp::make({3, 1}, Activation::Identity, Activation::Identity, rng);
    QFunction q = QFunction::continuous(std::move(qnet), 1);
    Mlp trunk = Mlp::make({2, 3}, Activation::Identity, Activation::Identity, rng);
    PolicyHead pi(PolicyKind::Categorical, std::move(trunk), 3);
    std::vector<Tensor> states{Tensor::vec({0.0, 0.0})};
    CHECK_THROWS_AS(deterministic_pg_loss(q, pi, states), ConfigError);
}
