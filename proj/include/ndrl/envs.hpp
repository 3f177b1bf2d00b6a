#pragma once

#include <string>
#include <utility>

#include "ndrl/env.hpp"
#include "ndrl/rng.hpp"

namespace ndrl {

// States one-hot over positions 0..L-1, actions {0: left, 1: right}.
// Reward 0 everywhere except +1 on entering position L-1 (terminal); a
// configurable step penalty (default 0, keeping rewards sparse) replaces the
// zero for non-terminal steps.
class ChainWorld : public Env {
public:
    explicit ChainWorld(int length, double step_penalty = 0.0, int max_steps = 0);
    EnvSpec spec() const override;
    Tensor reset(std::optional<std::uint64_t> seed) override;
    StepResult step(const ActionValue& action) override;
    std::optional<ExactModel> exact_model() const override;
    std::unique_ptr<Env> clone() const override;

private:
    int length_;
    double step_penalty_;
    int max_steps_;
    int pos_ = 0;
    int steps_ = 0;
    bool done_ = true;
};

struct GridWorldConfig {
    int width = 4;
    int height = 4;
    std::vector<std::pair<int, int>> obstacles;
    std::pair<int, int> goal{-1, -1};   // default (W-1, H-1)
    std::pair<int, int> start{0, 0};
    double step_penalty = -0.01;        // set 0 to recover the sparse variant
    double goal_reward = 1.0;
    int max_steps = 0;                  // default 4*W*H; <0 disables
};

// Actions {0: up, 1: down, 2: left, 3: right}; bumping a wall or obstacle
// keeps the position. States one-hot over cells, index y*W + x.
class GridWorld : public Env {
public:
    explicit GridWorld(GridWorldConfig cfg);
    EnvSpec spec() const override;
    Tensor reset(std::optional<std::uint64_t> seed) override;
    StepResult step(const ActionValue& action) override;
    std::optional<ExactModel> exact_model() const override;
    std::unique_ptr<Env> clone() const override;

    bool at_goal() const { return x_ == cfg_.goal.first && y_ == cfg_.goal.second; }

private:
    GridWorldConfig cfg_;
    int effective_max_steps_;
    int x_ = 0, y_ = 0;
    int steps_ = 0;
    bool done_ = true;
    bool blocked(int x, int y) const;
    Tensor encode(int x, int y) const;
};

// Continuous control testbed: state (x, v), force a in [-1, 1],
// v' = 0.9 v + 0.1 a, x' = x + v' (position clamped to [-1, 1]),
// reward -(x^2 + 0.1 a^2), fixed length 100 (episode end is a truncation).
// Start x0 ~ U(-1, 1), v0 = 0.
class PointMass : public Env {
public:
    explicit PointMass(std::uint64_t seed = 0, int episode_len = 100);
    EnvSpec spec() const override;
    Tensor reset(std::optional<std::uint64_t> seed) override;
    StepResult step(const ActionValue& action) override;
    std::unique_ptr<Env> clone() const override;

private:
    int episode_len_;
    Rng rng_;
    double x_ = 0.0, v_ = 0.0;
    int steps_ = 0;
    bool done_ = true;
};

// One-step classification environment: state is a feature vector, actions are
// class indices, reward is accuracy (1 for the correct class, 0 otherwise).
// Sample order is a seeded Fisher-Yates shuffle; the cursor advances one
// sample per episode and reshuffles at the end of each pass.
class DatasetBandit : public Env {
public:
    DatasetBandit(std::vector<std::vector<double>> features, std::vector<int> labels,
                  int n_classes, std::uint64_t seed = 0);
    static DatasetBandit from_csv(const std::string& path, std::uint64_t seed = 0);

    EnvSpec spec() const override;
    Tensor reset(std::optional<std::uint64_t> seed) override;
    StepResult step(const ActionValue& action) override;
    std::unique_ptr<Env> clone() const override;

    // Privileged hooks (the labeling function h(s)); used by offline training
    // and test oracles, never by acting policies.
    int current_label() const;
    const std::vector<std::vector<double>>& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }
    std::size_t size() const { return features_.size(); }
    int n_classes() const { return n_classes_; }

private:
    std::vector<std::vector<double>> features_;
    std::vector<int> labels_;
    int n_classes_;
    Rng rng_;
    std::vector<std::size_t> order_;
    std::size_t cursor_ = 0;
    bool done_ = true;
    void reshuffle();
};

// Appends remaining_steps/limit to the state and cuts episodes at the limit
// (flagged truncated). The appended feature starts at 1 and decreases by
// 1/limit per step.
class TimeLimit : public Env {
public:
    TimeLimit(std::unique_ptr<Env> inner, int limit);
    EnvSpec spec() const override;
    Tensor reset(std::optional<std::uint64_t> seed) override;
    StepResult step(const ActionValue& action) override;
    std::unique_ptr<Env> clone() const override;

private:
    std::unique_ptr<Env> inner_;
    int limit_;
    int steps_ = 0;
    Tensor augment(const Tensor& s) const;
};

std::unique_ptr<Env> with_time_limit(std::unique_ptr<Env> env, int limit);

// Synthetic Gaussian-blob classification data: class means evenly spaced on a
// circle of the given radius (first two dims; higher dims are noise only).
struct BlobDataset {
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
};
BlobDataset make_blobs(int n_per_class, int classes, int dim, double radius, double noise_std,
                       std::uint64_t seed);

}  // namespace ndrl
