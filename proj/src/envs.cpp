#include "ndrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ndrl {

namespace {

Tensor one_hot(int index, int n) {
    Tensor t = Tensor::zeros({static_cast<std::size_t>(n)});
    t[static_cast<std::size_t>(index)] = 1.0;
    return t;
}

void check_discrete_action(const ActionValue& a, int count) {
    if (!a.is_discrete()) throw DomainError("expected a discrete action");
    if (a.index() < 0 || a.index() >= count) {
        throw DomainError("action index " + std::to_string(a.index()) + " out of range [0, " +
                          std::to_string(count) + ")");
    }
}

void check_not_done(bool done, const char* env) {
    if (done) throw StateError(std::string(env) + ": step called after episode end (reset first)");
}

}  // namespace

// ---------------- ChainWorld ----------------

ChainWorld::ChainWorld(int length, double step_penalty, int max_steps)
    : length_(length), step_penalty_(step_penalty), max_steps_(max_steps) {
    if (length < 2) throw ConfigError("ChainWorld length must be >= 2");
}

EnvSpec ChainWorld::spec() const {
    EnvSpec s;
    s.state_dim = length_;
    s.action = ActionKind::discrete(2);
    if (max_steps_ > 0) s.max_episode_steps = max_steps_;
    s.reward_min = std::min(step_penalty_, 0.0);
    s.reward_max = 1.0;
    return s;
}

Tensor ChainWorld::reset(std::optional<std::uint64_t>) {
    pos_ = 0;
    steps_ = 0;
    done_ = false;
    return one_hot(pos_, length_);
}

StepResult ChainWorld::step(const ActionValue& action) {
    check_not_done(done_, "ChainWorld");
    check_discrete_action(action, 2);
    int next = std::clamp(pos_ + (action.index() == 0 ? -1 : 1), 0, length_ - 1);
    ++steps_;
    StepResult r;
    pos_ = next;
    r.next_state = one_hot(pos_, length_);
    if (pos_ == length_ - 1) {
        r.reward = 1.0;
        r.done = true;
    } else {
        r.reward = step_penalty_;
        if (max_steps_ > 0 && steps_ >= max_steps_) {
            r.done = true;
            r.truncated = true;
        }
    }
    done_ = r.done;
    return r;
}

std::optional<ExactModel> ChainWorld::exact_model() const {
    ExactModel m;
    m.n_states = length_;
    m.n_actions = 2;
    m.start_state = 0;
    int L = length_;
    double penalty = step_penalty_;
    m.next_state = [L](int s, int a) { return std::clamp(s + (a == 0 ? -1 : 1), 0, L - 1); };
    m.reward = [L, penalty](int s, int a) {
        int next = std::clamp(s + (a == 0 ? -1 : 1), 0, L - 1);
        return next == L - 1 ? 1.0 : penalty;
    };
    m.is_terminal = [L](int s) { return s == L - 1; };
    m.encode = [L](int s) { return one_hot(s, L); };
    return m;
}

std::unique_ptr<Env> ChainWorld::clone() const { return std::make_unique<ChainWorld>(*this); }

// ---------------- GridWorld ----------------

GridWorld::GridWorld(GridWorldConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.width < 1 || cfg_.height < 1) throw ConfigError("GridWorld dims must be positive");
    if (cfg_.goal.first < 0) cfg_.goal = {cfg_.width - 1, cfg_.height - 1};
    effective_max_steps_ = cfg_.max_steps == 0 ? 4 * cfg_.width * cfg_.height : cfg_.max_steps;
    auto inside = [&](std::pair<int, int> p) {
        return p.first >= 0 && p.first < cfg_.width && p.second >= 0 && p.second < cfg_.height;
    };
    if (!inside(cfg_.goal) || !inside(cfg_.start)) {
        throw ConfigError("GridWorld goal/start outside the grid");
    }
    if (blocked(cfg_.goal.first, cfg_.goal.second) ||
        blocked(cfg_.start.first, cfg_.start.second)) {
        throw ConfigError("GridWorld goal/start on an obstacle");
    }
}

bool GridWorld::blocked(int x, int y) const {
    for (const auto& o : cfg_.obstacles) {
        if (o.first == x && o.second == y) return true;
    }
    return false;
}

Tensor GridWorld::encode(int x, int y) const {
    return one_hot(y * cfg_.width + x, cfg_.width * cfg_.height);
}

EnvSpec GridWorld::spec() const {
    EnvSpec s;
    s.state_dim = cfg_.width * cfg_.height;
    s.action = ActionKind::discrete(4);
    if (effective_max_steps_ > 0) s.max_episode_steps = effective_max_steps_;
    s.reward_min = std::min(cfg_.step_penalty, 0.0);
    s.reward_max = std::max(cfg_.goal_reward, 0.0);
    return s;
}

Tensor GridWorld::reset(std::optional<std::uint64_t>) {
    x_ = cfg_.start.first;
    y_ = cfg_.start.second;
    steps_ = 0;
    done_ = false;
    return encode(x_, y_);
}

StepResult GridWorld::step(const ActionValue& action) {
    check_not_done(done_, "GridWorld");
    check_discrete_action(action, 4);
    static constexpr int dx[4] = {0, 0, -1, 1};  // up, down, left, right
    static constexpr int dy[4] = {-1, 1, 0, 0};
    int nx = x_ + dx[action.index()];
    int ny = y_ + dy[action.index()];
    bool bump = nx < 0 || nx >= cfg_.width || ny < 0 || ny >= cfg_.height || blocked(nx, ny);
    if (!bump) {
        x_ = nx;
        y_ = ny;
    }
    ++steps_;
    StepResult r;
    r.next_state = encode(x_, y_);
    if (at_goal()) {
        r.reward = cfg_.goal_reward;
        r.done = true;
    } else {
        r.reward = cfg_.step_penalty;
        if (effective_max_steps_ > 0 && steps_ >= effective_max_steps_) {
            r.done = true;
            r.truncated = true;
        }
    }
    done_ = r.done;
    return r;
}

std::optional<ExactModel> GridWorld::exact_model() const {
    ExactModel m;
    int W = cfg_.width, H = cfg_.height;
    m.n_states = W * H;
    m.n_actions = 4;
    m.start_state = cfg_.start.second * W + cfg_.start.first;
    int goal = cfg_.goal.second * W + cfg_.goal.first;
    GridWorldConfig cfg = cfg_;
    auto blocked_at = [cfg](int x, int y) {
        for (const auto& o : cfg.obstacles) {
            if (o.first == x && o.second == y) return true;
        }
        return false;
    };
    auto next_fn = [W, H, blocked_at](int s, int a) {
        static constexpr int dx[4] = {0, 0, -1, 1};
        static constexpr int dy[4] = {-1, 1, 0, 0};
        int x = s % W, y = s / W;
        int nx = x + dx[a], ny = y + dy[a];
        if (nx < 0 || nx >= W || ny < 0 || ny >= H || blocked_at(nx, ny)) return s;
        return ny * W + nx;
    };
    m.next_state = next_fn;
    m.reward = [next_fn, goal, cfg](int s, int a) {
        return next_fn(s, a) == goal ? cfg.goal_reward : cfg.step_penalty;
    };
    m.is_terminal = [goal](int s) { return s == goal; };
    m.encode = [W, H](int s) { return one_hot(s, W * H); };
    return m;
}

std::unique_ptr<Env> GridWorld::clone() const { return std::make_unique<GridWorld>(*this); }

// ---------------- PointMass ----------------

PointMass::PointMass(std::uint64_t seed, int episode_len)
    : episode_len_(episode_len), rng_(seed) {
    if (episode_len_ < 1) throw ConfigError("PointMass episode length must be >= 1");
}

EnvSpec PointMass::spec() const {
    EnvSpec s;
    s.state_dim = 2;
    s.action = ActionKind::continuous(1, {-1.0}, {1.0});
    s.max_episode_steps = episode_len_;
    s.reward_min = -1.1;  // -(x^2 + 0.1 a^2) with |x| <= 1, |a| <= 1
    s.reward_max = 0.0;
    return s;
}

Tensor PointMass::reset(std::optional<std::uint64_t> seed) {
    if (seed) rng_ = Rng(*seed);
    x_ = rng_.uniform(-1.0, 1.0);
    v_ = 0.0;
    steps_ = 0;
    done_ = false;
    return Tensor::vec({x_, v_});
}

StepResult PointMass::step(const ActionValue& action) {
    check_not_done(done_, "PointMass");
    const auto& a = action.vec();
    if (a.size() != 1) throw DomainError("PointMass expects a 1-dimensional action");
    if (a[0] < -1.0 - 1e-12 || a[0] > 1.0 + 1e-12) {
        throw DomainError("PointMass action out of bounds [-1, 1]: " + std::to_string(a[0]));
    }
    double force = std::clamp(a[0], -1.0, 1.0);
    StepResult r;
    r.reward = -(x_ * x_ + 0.1 * force * force);
    v_ = 0.9 * v_ + 0.1 * force;
    x_ = std::clamp(x_ + v_, -1.0, 1.0);
    ++steps_;
    r.next_state = Tensor::vec({x_, v_});
    if (steps_ >= episode_len_) {
        r.done = true;
        r.truncated = true;  // fixed-length episode, not a true terminal
    }
    done_ = r.done;
    return r;
}

std::unique_ptr<Env> PointMass::clone() const { return std::make_unique<PointMass>(*this); }

// ---------------- DatasetBandit ----------------

DatasetBandit::DatasetBandit(std::vector<std::vector<double>> features, std::vector<int> labels,
                             int n_classes, std::uint64_t seed)
    : features_(std::move(features)),
      labels_(std::move(labels)),
      n_classes_(n_classes),
      rng_(seed) {
    if (features_.empty() || features_.size() != labels_.size()) {
        throw ConfigError("DatasetBandit: features and labels must be nonempty and equal length");
    }
    for (int l : labels_) {
        if (l < 0 || l >= n_classes_) throw ConfigError("DatasetBandit: label out of range");
    }
    order_.resize(features_.size());
    reshuffle();
}

DatasetBandit DatasetBandit::from_csv(const std::string& path, std::uint64_t seed) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open dataset csv: " + path);
    std::vector<std::vector<double>> features;
    std::vector<int> labels;
    int max_label = -1;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (row.size() < 2) throw ConfigError("dataset csv rows need f1,...,fk,label");
        int label = static_cast<int>(row.back());
        row.pop_back();
        features.push_back(std::move(row));
        labels.push_back(label);
        max_label = std::max(max_label, label);
    }
    return DatasetBandit(std::move(features), std::move(labels), max_label + 1, seed);
}

void DatasetBandit::reshuffle() {
    for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
    rng_.shuffle(order_);
    cursor_ = 0;
}

EnvSpec DatasetBandit::spec() const {
    EnvSpec s;
    s.state_dim = static_cast<int>(features_[0].size());
    s.action = ActionKind::discrete(n_classes_);
    s.max_episode_steps = 1;
    s.reward_min = 0.0;
    s.reward_max = 1.0;
    return s;
}

Tensor DatasetBandit::reset(std::optional<std::uint64_t> seed) {
    if (seed) {
        rng_ = Rng(*seed);
        reshuffle();
    } else if (cursor_ >= order_.size()) {
        reshuffle();
    }
    done_ = false;
    return Tensor::vec(features_[order_[cursor_]]);
}

int DatasetBandit::current_label() const {
    if (done_) throw StateError("DatasetBandit: no active episode");
    return labels_[order_[cursor_]];
}

StepResult DatasetBandit::step(const ActionValue& action) {
    check_not_done(done_, "DatasetBandit");
    check_discrete_action(action, n_classes_);
    StepResult r;
    r.reward = action.index() == labels_[order_[cursor_]] ? 1.0 : 0.0;
    r.next_state = Tensor::vec(features_[order_[cursor_]]);  // terminal observation
    r.done = true;
    done_ = true;
    ++cursor_;
    return r;
}

std::unique_ptr<Env> DatasetBandit::clone() const { return std::make_unique<DatasetBandit>(*this); }

// ---------------- TimeLimit ----------------

TimeLimit::TimeLimit(std::unique_ptr<Env> inner, int limit)
    : inner_(std::move(inner)), limit_(limit) {
    if (limit_ < 1) throw ConfigError("time limit must be >= 1");
}

Tensor TimeLimit::augment(const Tensor& s) const {
    Tensor out = s;
    out.shape = {s.numel() + 1};
    out.data.push_back(static_cast<double>(limit_ - steps_) / static_cast<double>(limit_));
    return out;
}

EnvSpec TimeLimit::spec() const {
    EnvSpec s = inner_->spec();
    s.state_dim += 1;
    s.max_episode_steps = s.max_episode_steps ? std::min(*s.max_episode_steps, limit_) : limit_;
    return s;
}

Tensor TimeLimit::reset(std::optional<std::uint64_t> seed) {
    steps_ = 0;
    return augment(inner_->reset(seed));
}

StepResult TimeLimit::step(const ActionValue& action) {
    StepResult r = inner_->step(action);
    ++steps_;
    if (!r.done && steps_ >= limit_) {
        r.done = true;
        r.truncated = true;
    }
    r.next_state = augment(r.next_state);
    return r;
}

std::unique_ptr<Env> TimeLimit::clone() const {
    return std::make_unique<TimeLimit>(inner_->clone(), limit_);
}

std::unique_ptr<Env> with_time_limit(std::unique_ptr<Env> env, int limit) {
    return std::make_unique<TimeLimit>(std::move(env), limit);
}

// ---------------- Synthetic data ----------------

BlobDataset make_blobs(int n_per_class, int classes, int dim, double radius, double noise_std,
                       std::uint64_t seed) {
    if (n_per_class < 1 || classes < 2 || dim < 2) {
        throw ConfigError("make_blobs: need n_per_class >= 1, classes >= 2, dim >= 2");
    }
    Rng rng(seed);
    BlobDataset out;
    out.features.reserve(static_cast<std::size_t>(n_per_class) * classes);
    for (int c = 0; c < classes; ++c) {
        double angle = 2.0 * 3.14159265358979323846 * c / classes;
        double cx = radius * std::cos(angle);
        double cy = radius * std::sin(angle);
        for (int i = 0; i < n_per_class; ++i) {
            std::vector<double> f(static_cast<std::size_t>(dim), 0.0);
            f[0] = cx + noise_std * rng.normal();
            f[1] = cy + noise_std * rng.normal();
            for (int d = 2; d < dim; ++d) f[static_cast<std::size_t>(d)] = noise_std * rng.normal();
            out.features.push_back(std::move(f));
            out.labels.push_back(c);
        }
    }
    return out;
}

}  // namespace ndrl
