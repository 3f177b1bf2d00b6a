#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <variant>
#include <vector>

#include "ndrl/errors.hpp"
#include "ndrl/tensor.hpp"

namespace ndrl {

// Discrete index or continuous vector action.
struct ActionValue {
    std::variant<int, std::vector<double>> value;

    static ActionValue discrete(int index) { return ActionValue{index}; }
    static ActionValue continuous(std::vector<double> v) { return ActionValue{std::move(v)}; }

    bool is_discrete() const { return std::holds_alternative<int>(value); }
    int index() const {
        if (!is_discrete()) throw DomainError("action is not discrete");
        return std::get<int>(value);
    }
    const std::vector<double>& vec() const {
        if (is_discrete()) throw DomainError("action is not continuous");
        return std::get<std::vector<double>>(value);
    }
};

struct ActionKind {
    enum class Type { Discrete, Continuous };
    Type type = Type::Discrete;
    int count = 0;                  // discrete
    int dim = 0;                    // continuous
    std::vector<double> low, high;  // continuous bounds, elementwise

    static ActionKind discrete(int n) { return {Type::Discrete, n, 0, {}, {}}; }
    static ActionKind continuous(int dim, std::vector<double> low, std::vector<double> high) {
        return {Type::Continuous, 0, dim, std::move(low), std::move(high)};
    }
    bool is_discrete() const { return type == Type::Discrete; }
};

struct EnvSpec {
    int state_dim = 0;
    ActionKind action;
    std::optional<int> max_episode_steps;
    double reward_min = 0.0;
    double reward_max = 0.0;
};

// One environment interaction. Terminal observations are delivered with
// done=true; `truncated` marks time-limit cutoffs distinctly from true
// terminals so bootstrapping can treat them differently.
struct Transition {
    Tensor state;
    ActionValue action;
    double reward = 0.0;
    Tensor next_state;
    bool done = false;
    bool truncated = false;
};

struct StepResult {
    Tensor next_state;
    double reward = 0.0;
    bool done = false;
    bool truncated = false;
};

// Pure tabular model over (state index, action index), available for the
// finite discrete environments. Used by value-iteration oracles and search.
struct ExactModel {
    int n_states = 0;
    int n_actions = 0;
    int start_state = 0;
    std::function<int(int, int)> next_state;
    std::function<double(int, int)> reward;
    std::function<bool(int)> is_terminal;
    std::function<Tensor(int)> encode;  // index -> observation
};

class Env {
public:
    virtual ~Env() = default;
    virtual EnvSpec spec() const = 0;
    // Same seed, same start state. Without a seed the env continues its
    // internal stream.
    virtual Tensor reset(std::optional<std::uint64_t> seed = std::nullopt) = 0;
    virtual StepResult step(const ActionValue& action) = 0;
    virtual std::optional<ExactModel> exact_model() const { return std::nullopt; }
    virtual std::unique_ptr<Env> clone() const = 0;
};

}  // namespace ndrl
