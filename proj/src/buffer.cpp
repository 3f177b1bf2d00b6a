#include "ndrl/buffer.hpp"

#include <algorithm>
#include <cmath>

namespace ndrl {

SumTree::SumTree(std::size_t leaves) : leaves_(leaves) {
    base_ = 1;
    while (base_ < leaves_) base_ *= 2;
    nodes_.assign(2 * base_, 0.0);
}

void SumTree::set(std::size_t i, double value) {
    std::size_t node = base_ + i;
    nodes_[node] = value;
    for (node /= 2; node >= 1; node /= 2) {
        nodes_[node] = nodes_[2 * node] + nodes_[2 * node + 1];
    }
}

double SumTree::get(std::size_t i) const { return nodes_[base_ + i]; }

double SumTree::total() const { return nodes_[1]; }

std::size_t SumTree::sample(double u) const {
    std::size_t node = 1;
    while (node < base_) {
        double left = nodes_[2 * node];
        if (u < left) {
            node = 2 * node;
        } else {
            u -= left;
            node = 2 * node + 1;
        }
    }
    std::size_t leaf = node - base_;
    // guard against u == total landing one past the last occupied leaf
    return std::min(leaf, leaves_ - 1);
}

ReplayBuffer::ReplayBuffer(std::size_t capacity, bool prioritized, PriorityConfig priority)
    : capacity_(capacity),
      prioritized_(prioritized),
      pcfg_(priority),
      slots_(capacity),
      generations_(capacity, 0),
      priorities_(capacity, 0.0),
      tree_(capacity == 0 ? 1 : capacity) {
    if (capacity_ == 0) throw ConfigError("ReplayBuffer capacity must be positive");
    if (prioritized_ && (pcfg_.floor <= 0.0 || pcfg_.omega < 0.0)) {
        throw ConfigError("prioritized replay needs floor > 0 and omega >= 0");
    }
}

void ReplayBuffer::set_priority(std::size_t index, double raw) {
    priorities_[index] = raw;
    tree_.set(index, std::pow(raw, pcfg_.omega));
}

SlotId ReplayBuffer::push(Transition t) {
    std::size_t index = cursor_;
    slots_[index] = std::move(t);
    generations_[index] = ++push_count_;
    if (prioritized_) set_priority(index, max_priority_);
    cursor_ = (cursor_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
    return {static_cast<std::uint32_t>(index), generations_[index]};
}

const Transition& ReplayBuffer::at(std::size_t index) const {
    if (index >= size_) throw IndexError("replay slot " + std::to_string(index) + " out of range");
    return slots_[index];
}

std::vector<SampledTransition> ReplayBuffer::sample_uniform(std::size_t batch, Rng& rng) const {
    if (size_ == 0) throw EmptyBufferError("sample_uniform on empty replay buffer");
    std::vector<SampledTransition> out;
    out.reserve(batch);
    double p = 1.0 / static_cast<double>(size_);
    for (std::size_t i = 0; i < batch; ++i) {
        std::size_t index = static_cast<std::size_t>(rng.next_u64() % size_);
        out.push_back({{static_cast<std::uint32_t>(index), generations_[index]}, &slots_[index], p});
    }
    return out;
}

std::vector<SampledTransition> ReplayBuffer::sample_prioritized(std::size_t batch, Rng& rng) const {
    if (size_ == 0) throw EmptyBufferError("sample_prioritized on empty replay buffer");
    if (!prioritized_) throw StateError("buffer was not constructed with prioritization");
    std::vector<SampledTransition> out;
    out.reserve(batch);
    double total = tree_.total();
    for (std::size_t i = 0; i < batch; ++i) {
        std::size_t index = tree_.sample(rng.uniform01() * total);
        out.push_back({{static_cast<std::uint32_t>(index), generations_[index]},
                       &slots_[index],
                       tree_.get(index) / total});
    }
    return out;
}

void ReplayBuffer::update_priorities(std::span<const SlotId> slots, std::span<const double> losses) {
    if (!prioritized_) throw StateError("buffer was not constructed with prioritization");
    if (slots.size() != losses.size()) {
        throw DimensionError("update_priorities: slots and losses differ in length");
    }
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const SlotId& id = slots[i];
        if (id.index >= capacity_ || generations_[id.index] != id.generation) {
            ++stale_updates_;  // overwritten since sampling
            continue;
        }
        if (losses[i] < 0.0 || !std::isfinite(losses[i])) {
            throw DomainError("update_priorities: losses must be finite and nonnegative");
        }
        double raw = losses[i] + pcfg_.floor;
        set_priority(id.index, raw);
        max_priority_ = std::max(max_priority_, raw);
    }
}

double ReplayBuffer::priority_of(std::size_t index) const {
    if (index >= capacity_) throw IndexError("priority_of: slot out of range");
    return priorities_[index];
}

double ReplayBuffer::priority_mass() const { return tree_.total(); }

double ReplayBuffer::importance_weight(double probability, std::size_t size, double beta) {
    if (probability <= 0.0) throw DomainError("importance_weight: probability must be positive");
    return std::pow(1.0 / (static_cast<double>(size) * probability), beta);
}

std::vector<NamedTensor> ReplayBuffer::dump(const std::string& prefix) const {
    std::vector<NamedTensor> out;
    std::size_t sdim = size_ ? slots_[0].state.numel() : 0;
    bool discrete = size_ ? slots_[0].action.is_discrete() : true;
    std::size_t adim = 1;
    if (size_ && !discrete) adim = slots_[0].action.vec().size();
    out.push_back({prefix + ".meta",
                   Tensor::vec({static_cast<double>(capacity_), static_cast<double>(size_),
                                static_cast<double>(cursor_), prioritized_ ? 1.0 : 0.0,
                                pcfg_.omega, pcfg_.floor, max_priority_,
                                static_cast<double>(push_count_), discrete ? 1.0 : 0.0})});
    Tensor states = Tensor::zeros({size_, sdim});
    Tensor next_states = Tensor::zeros({size_, sdim});
    Tensor actions = Tensor::zeros({size_, adim});
    Tensor rewards = Tensor::zeros({size_});
    Tensor done = Tensor::zeros({size_});
    Tensor truncated = Tensor::zeros({size_});
    Tensor priorities = Tensor::zeros({size_});
    Tensor generations = Tensor::zeros({size_});
    for (std::size_t i = 0; i < size_; ++i) {
        const Transition& t = slots_[i];
        std::copy(t.state.data.begin(), t.state.data.end(), states.data.begin() + i * sdim);
        std::copy(t.next_state.data.begin(), t.next_state.data.end(),
                  next_states.data.begin() + i * sdim);
        if (discrete) {
            actions.data[i] = static_cast<double>(t.action.index());
        } else {
            std::copy(t.action.vec().begin(), t.action.vec().end(),
                      actions.data.begin() + i * adim);
        }
        rewards[i] = t.reward;
        done[i] = t.done ? 1.0 : 0.0;
        truncated[i] = t.truncated ? 1.0 : 0.0;
        priorities[i] = priorities_[i];
        generations[i] = static_cast<double>(generations_[i]);
    }
    out.push_back({prefix + ".states", std::move(states)});
    out.push_back({prefix + ".actions", std::move(actions)});
    out.push_back({prefix + ".rewards", std::move(rewards)});
    out.push_back({prefix + ".next_states", std::move(next_states)});
    out.push_back({prefix + ".done", std::move(done)});
    out.push_back({prefix + ".truncated", std::move(truncated)});
    out.push_back({prefix + ".priorities", std::move(priorities)});
    out.push_back({prefix + ".generations", std::move(generations)});
    return out;
}

ReplayBuffer ReplayBuffer::restore(const std::vector<NamedTensor>& tensors,
                                   const std::string& prefix) {
    const Tensor& meta = find_tensor(tensors, prefix + ".meta");
    if (meta.numel() != 9) throw CheckpointError("replay meta tensor malformed");
    auto capacity = static_cast<std::size_t>(meta[0]);
    auto size = static_cast<std::size_t>(meta[1]);
    bool prioritized = meta[3] != 0.0;
    bool discrete = meta[8] != 0.0;
    ReplayBuffer buf(capacity, prioritized, {meta[4], meta[5]});
    const Tensor& states = find_tensor(tensors, prefix + ".states");
    const Tensor& actions = find_tensor(tensors, prefix + ".actions");
    const Tensor& rewards = find_tensor(tensors, prefix + ".rewards");
    const Tensor& next_states = find_tensor(tensors, prefix + ".next_states");
    const Tensor& done = find_tensor(tensors, prefix + ".done");
    const Tensor& truncated = find_tensor(tensors, prefix + ".truncated");
    const Tensor& priorities = find_tensor(tensors, prefix + ".priorities");
    std::size_t sdim = size ? states.numel() / size : 0;
    std::size_t adim = size ? actions.numel() / size : 1;
    for (std::size_t i = 0; i < size; ++i) {
        Transition t;
        t.state = Tensor::vec({states.data.begin() + i * sdim, states.data.begin() + (i + 1) * sdim});
        t.next_state = Tensor::vec(
            {next_states.data.begin() + i * sdim, next_states.data.begin() + (i + 1) * sdim});
        if (discrete) {
            t.action = ActionValue::discrete(static_cast<int>(actions.data[i]));
        } else {
            t.action = ActionValue::continuous(
                {actions.data.begin() + i * adim, actions.data.begin() + (i + 1) * adim});
        }
        t.reward = rewards[i];
        t.done = done[i] != 0.0;
        t.truncated = truncated[i] != 0.0;
        buf.push(std::move(t));
        if (prioritized) buf.set_priority(i, priorities[i]);
    }
    buf.cursor_ = static_cast<std::size_t>(meta[2]);
    buf.max_priority_ = meta[6];
    buf.push_count_ = static_cast<std::uint64_t>(meta[7]);
    return buf;
}

}  // namespace ndrl
