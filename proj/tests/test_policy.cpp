#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <array>
#include <cmath>

#include "ndrl/errors.hpp"
#include "ndrl/policy.hpp"
#include "oracle_helpers.hpp"

using namespace ndrl;

namespace {

// Trunk ignoring its 1-dim input: output = bias vector.
PolicyHead bias_head(PolicyKind kind, int n, std::vector<double> bias) {
    Rng rng(0);
    int out = (kind == PolicyKind::DiagonalGaussian || kind == PolicyKind::TanhGaussian) ? 2 * n : n;
    Mlp trunk = Mlp::make({1, out}, Activation::Identity, Activation::Identity, rng);
    std::fill(trunk.weights[0].begin(), trunk.weights[0].end(), 0.0);
    trunk.biases[0] = std::move(bias);
    return PolicyHead(kind, std::move(trunk), n);
}

const Tensor kState = Tensor::vec({0.3});

}  // namespace

TEST_CASE("sample: degenerate categorical always picks the certain action") {
    PolicyHead head = bias_head(PolicyKind::Categorical, 2, {100.0, -100.0});
    Rng rng(1);
    for (int i = 0; i < 50; ++i) {
        PolicySample s = head.sample(kState, rng);
        CHECK(s.action.index() == 0);
        CHECK(s.log_prob == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("sample: injected noise follows the reparametrization formula") {
    PolicyHead head = bias_head(PolicyKind::DiagonalGaussian, 1, {0.0, 0.0});  // mu=0, sigma=1
    std::array<double, 1> xi{0.5};
    PolicySample s = head.sample_given_noise(kState, xi);
    CHECK(s.action.vec()[0] == doctest::Approx(0.5));
    CHECK(s.pre_squash[0] == doctest::Approx(0.5));
}

TEST_CASE("sample: deterministic head refuses to sample") {
    PolicyHead head = bias_head(PolicyKind::Deterministic, 1, {0.7});
    Rng rng(0);
    CHECK_THROWS_AS(head.sample(kState, rng), UnsupportedError);
    CHECK(head.act_greedy(kState).vec()[0] == doctest::Approx(0.7));
}

TEST_CASE("log_prob: categorical uniform and standard normal mode") {
    PolicyHead cat = bias_head(PolicyKind::Categorical, 4, {0, 0, 0, 0});
    for (int a = 0; a < 4; ++a) {
        CHECK(cat.log_prob(kState, ActionValue::discrete(a)) == doctest::Approx(-std::log(4.0)));
    }

    PolicyHead gauss = bias_head(PolicyKind::DiagonalGaussian, 1, {0.0, 0.0});
    CHECK(gauss.log_prob(kState, ActionValue::continuous({0.0})) ==
          doctest::Approx(-0.91893853320467274).epsilon(1e-12));

    PolicyHead tanh_head = bias_head(PolicyKind::TanhGaussian, 1, {0.0, 0.0});
    CHECK_THROWS_AS(tanh_head.log_prob(kState, ActionValue::continuous({1.0})), DomainError);
    CHECK_THROWS_AS(tanh_head.log_prob(kState, ActionValue::continuous({-1.5})), DomainError);
}

TEST_CASE("tanh-gaussian density integrates to one (quadrature oracle)") {
    // integrate p(a) da over (-1,1) by substituting a = tanh(u):
    // sum p(tanh u) (1 - tanh^2 u) du on a fine uniform grid
    for (auto [mu, log_std] : {std::pair{0.0, 0.0}, {0.8, -0.7}, {-1.2, 0.4}}) {
        PolicyHead head = bias_head(PolicyKind::TanhGaussian, 1, {mu, log_std});
        double sigma = std::exp(log_std);
        double lo = mu - 9.0 * sigma, hi = mu + 9.0 * sigma;
        int n = 40001;
        double h = (hi - lo) / (n - 1);
        double integral = 0.0;
        for (int i = 0; i < n; ++i) {
            double u = lo + h * i;
            double a = std::tanh(u);
            if (std::abs(a) >= 1.0 - 1e-15) continue;
            double p = std::exp(head.log_prob(kState, ActionValue::continuous({a})));
            double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;  // trapezoid
            integral += w * p * (1.0 - a * a) * h;
        }
        CHECK(std::abs(integral - 1.0) < 1e-3);
    }
}

TEST_CASE("categorical probabilities sum to one") {
    Rng rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> bias(5);
        for (auto& b : bias) b = rng.uniform(-30, 30);
        PolicyHead head = bias_head(PolicyKind::Categorical, 5, bias);
        auto p = head.probs(kState);
        double sum = 0.0;
        for (double v : p) sum += v;
        CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
}

TEST_CASE("entropy: closed forms and degenerate cases") {
    PolicyHead cat = bias_head(PolicyKind::Categorical, 2, {0.0, 0.0});
    CHECK(cat.entropy(kState) == doctest::Approx(std::log(2.0)));

    PolicyHead certain = bias_head(PolicyKind::Categorical, 2, {100.0, -100.0});
    CHECK(certain.entropy(kState) == doctest::Approx(0.0).epsilon(1e-12));

    PolicyHead gauss = bias_head(PolicyKind::DiagonalGaussian, 1, {0.0, 0.0});
    CHECK(gauss.entropy(kState) == doctest::Approx(1.4189385332046727));

    PolicyHead det = bias_head(PolicyKind::Deterministic, 1, {0.0});
    CHECK_THROWS_AS(det.entropy(kState), UnsupportedError);

    PolicyHead th = bias_head(PolicyKind::TanhGaussian, 1, {0.0, 0.0});
    CHECK_THROWS_AS(th.entropy(kState), ConfigError);  // estimate needs an rng
    Rng rng(3);
    CHECK(std::isfinite(th.entropy(kState, &rng)));
}

TEST_CASE("act_greedy: argmax with lowest-index ties; tanh of the mean") {
    PolicyHead cat = bias_head(PolicyKind::Categorical, 3,
                               {std::log(0.2), std::log(0.5), std::log(0.3)});
    CHECK(cat.act_greedy(kState).index() == 1);

    PolicyHead tie = bias_head(PolicyKind::Categorical, 2, {0.0, 0.0});
    CHECK(tie.act_greedy(kState).index() == 0);

    PolicyHead th = bias_head(PolicyKind::TanhGaussian, 1, {0.0, 0.3});
    CHECK(th.act_greedy(kState).vec()[0] == doctest::Approx(0.0));
}

TEST_CASE("greedy action is invariant under softmax temperature rescaling") {
    Rng rng(21);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> z(4);
        for (auto& v : z) v = rng.uniform(-3, 3);
        PolicyHead base = bias_head(PolicyKind::Categorical, 4, z);
        int want = base.act_greedy(kState).index();
        for (double temp : {0.25, 2.0, 10.0}) {
            std::vector<double> scaled(z);
            for (auto& v : scaled) v /= temp;
            PolicyHead head = bias_head(PolicyKind::Categorical, 4, scaled);
            CHECK(head.act_greedy(kState).index() == want);
        }
    }
}

TEST_CASE("sample/log_prob coherence within 1e-10") {
    Rng init(4);
    for (auto kind : {PolicyKind::Categorical, PolicyKind::DiagonalGaussian, PolicyKind::TanhGaussian}) {
        int n = kind == PolicyKind::Categorical ? 5 : 2;
        int out = kind == PolicyKind::Categorical ? n : 2 * n;
        Mlp trunk = Mlp::make({3, 8, out}, Activation::Tanh, Activation::Identity, init);
        PolicyHead head(kind, std::move(trunk), n);
        Rng rng(100);
        Tensor state = Tensor::vec({0.1, -0.4, 0.8});
        for (int i = 0; i < 200; ++i) {
            PolicySample s = head.sample(state, rng);
            double lp = head.log_prob(state, s.action);
            CHECK(std::abs(lp - s.log_prob) <= 1e-10);
        }
    }
}

TEST_CASE("reparametrization gradient: d(sample)/dmu = 1, d(sample)/dsigma = xi") {
    // trunk bias parameters are (mu, log_std); freeze the noise and finite-
    // difference the sampled action against them
    PolicyHead head = bias_head(PolicyKind::DiagonalGaussian, 1, {0.2, -0.3});
    std::array<double, 1> xi{0.7};
    PolicySample s = head.sample_given_noise(kState, xi);
    std::array<double, 1> d_action{1.0};
    head.trunk().zero_grads();
    head.backward_reparam(s, d_action, 0.0);
    double g_mu = head.trunk().bias_grads[0][0];
    double g_lraw = head.trunk().bias_grads[0][1];
    CHECK(g_mu == doctest::Approx(1.0));
    // d a / d sigma = xi, and d sigma / d log_std = sigma
    double sigma = std::exp(-0.3);
    CHECK(g_lraw == doctest::Approx(xi[0] * sigma));

    auto eval = [&]() { return head.sample_given_noise(kState, xi).action.vec()[0]; };
    CHECK(g_mu == doctest::Approx(oracle::finite_diff(
        std::span<double>(head.trunk().biases[0].data(), 1), eval)[0]));
}

TEST_CASE("backward_reparam matches finite differences with frozen noise") {
    Rng init(7);
    for (auto kind : {PolicyKind::DiagonalGaussian, PolicyKind::TanhGaussian}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            Rng rng(Rng::derive(seed, "reparam"));
            Mlp trunk = Mlp::make({2, 6, 4}, Activation::Tanh, Activation::Identity, init);
            PolicyHead head(kind, std::move(trunk), 2);
            Tensor state = Tensor::vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
            std::vector<double> xi = rng.normal_vec(2);
            std::array<double, 2> c{rng.uniform(-1, 1), rng.uniform(-1, 1)};
            double c_lp = rng.uniform(-1, 1);

            head.trunk().zero_grads();
            PolicySample s = head.sample_given_noise(state, xi);
            head.backward_reparam(s, c, c_lp);
            auto eval = [&]() {
                PolicySample t = head.sample_given_noise(state, xi);
                return c[0] * t.action.vec()[0] + c[1] * t.action.vec()[1] + c_lp * t.log_prob;
            };
            auto check = oracle::check_grads(head.trunk().param_refs("pi"), eval, 1e-4);
            CHECK(check.ok(1e-4));
        }
    }
}

TEST_CASE("backward_log_prob matches finite differences for a fixed action") {
    Rng init(13);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Rng rng(Rng::derive(seed, "score"));
        // categorical
        {
            Mlp trunk = Mlp::make({2, 5, 3}, Activation::Tanh, Activation::Identity, init);
            PolicyHead head(PolicyKind::Categorical, std::move(trunk), 3);
            Tensor state = Tensor::vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
            ActionValue a = ActionValue::discrete(rng.uniform_int(3));
            double c = rng.uniform(-2, 2);
            head.trunk().zero_grads();
            MlpCache cache;
            head.log_prob_cached(state, a, cache);
            head.backward_log_prob(cache, a, c);
            auto eval = [&]() { return c * head.log_prob(state, a); };
            CHECK(oracle::check_grads(head.trunk().param_refs("pi"), eval, 1e-4).ok(1e-4));
        }
        // tanh-gaussian with a stored in-range action
        {
            Mlp trunk = Mlp::make({2, 5, 2}, Activation::Tanh, Activation::Identity, init);
            PolicyHead head(PolicyKind::TanhGaussian, std::move(trunk), 1);
            Tensor state = Tensor::vec({rng.uniform(-1, 1), rng.uniform(-1, 1)});
            ActionValue a = ActionValue::continuous({rng.uniform(-0.9, 0.9)});
            double c = rng.uniform(-2, 2);
            head.trunk().zero_grads();
            MlpCache cache;
            head.log_prob_cached(state, a, cache);
            head.backward_log_prob(cache, a, c);
            auto eval = [&]() { return c * head.log_prob(state, a); };
            CHECK(oracle::check_grads(head.trunk().param_refs("pi"), eval, 1e-4).ok(1e-4));
        }
    }
}

TEST_CASE("backward_sum_p_log_p matches finite differences") {
    Rng init(19);
    Mlp trunk = Mlp::make({2, 6, 4}, Activation::Tanh, Activation::Identity, init);
    PolicyHead head(PolicyKind::Categorical, std::move(trunk), 4);
    Tensor state = Tensor::vec({0.4, -0.2});
    head.trunk().zero_grads();
    MlpCache cache;
    head.log_prob_cached(state, ActionValue::discrete(0), cache);
    head.backward_sum_p_log_p(cache, 1.0);
    auto eval = [&]() {
        auto p = head.probs(state);
        double s = 0.0;
        for (double v : p) {
            if (v > 0) s += v * std::log(v);
        }
        return s;
    };
    CHECK(oracle::check_grads(head.trunk().param_refs("pi"), eval, 1e-4).ok(1e-4));
}

TEST_CASE("explore: epsilon extremes and uniform coverage") {
    ActionKind space = ActionKind::discrete(4);
    Rng rng(3);

    ExplorationSchedule greedy_only{ExplorationSchedule::Kind::EpsilonGreedy, 0.0, 0.0, 1};
    for (int i = 0; i < 100; ++i) {
        CHECK(greedy_only.explore(ActionValue::discrete(2), space, rng).index() == 2);
    }

    ExplorationSchedule always{ExplorationSchedule::Kind::EpsilonGreedy, 1.0, 1.0, 1};
    std::array<int, 4> counts{};
    for (int i = 0; i < 100000; ++i) {
        counts[static_cast<std::size_t>(always.explore(ActionValue::discrete(0), space, rng).index())]++;
    }
    for (int c : counts) CHECK(std::abs(c / 100000.0 - 0.25) < 0.01);
}

TEST_CASE("explore: linear decay hits the documented midpoint") {
    ExplorationSchedule sched{ExplorationSchedule::Kind::EpsilonGreedy, 1.0, 0.1, 100};
    sched.step_count = 50;
    CHECK(sched.epsilon() == doctest::Approx(0.55));
    sched.step_count = 1000;
    CHECK(sched.epsilon() == doctest::Approx(0.1));

    ExplorationSchedule expo = sched;
    expo.decay = ExplorationSchedule::Decay::Exponential;
    expo.step_count = 0;
    CHECK(expo.epsilon() == doctest::Approx(1.0));
    expo.step_count = 100;
    CHECK(expo.epsilon() == doctest::Approx(0.1));
}

TEST_CASE("explore: gaussian noise clips to bounds and kind mismatch errors") {
    ActionKind cont = ActionKind::continuous(1, {-1.0}, {1.0});
    Rng rng(5);
    ExplorationSchedule noise{ExplorationSchedule::Kind::GaussianNoise};
    noise.sigma = 10.0;
    for (int i = 0; i < 200; ++i) {
        double a = noise.explore(ActionValue::continuous({0.9}), cont, rng).vec()[0];
        CHECK(a <= 1.0);
        CHECK(a >= -1.0);
    }
    ExplorationSchedule eps{ExplorationSchedule::Kind::EpsilonGreedy};
    CHECK_THROWS_AS(eps.explore(ActionValue::continuous({0.0}), cont, rng), ConfigError);
    CHECK_THROWS_AS(noise.explore(ActionValue::discrete(0), ActionKind::discrete(2), rng),
                    ConfigError);
}

TEST_CASE("tanh-gaussian samples lie strictly inside (-1, 1)") {
    PolicyHead head = bias_head(PolicyKind::TanhGaussian, 1, {3.0, 2.0});  // pushy mean, max sigma
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
        double a = head.sample(kState, rng).action.vec()[0];
        CHECK(a > -1.0);
        CHECK(a < 1.0);
    }
}
