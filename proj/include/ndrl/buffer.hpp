#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "ndrl/checkpoint.hpp"
#include "ndrl/env.hpp"
#include "ndrl/rng.hpp"

namespace ndrl {

// Binary sum-tree over a fixed number of leaves; internal nodes hold the sum
// of their children. O(log n) point update and prefix-sum sampling.
class SumTree {
public:
    explicit SumTree(std::size_t leaves);
    void set(std::size_t i, double value);
    double get(std::size_t i) const;
    double total() const;
    // Finds the leaf where the prefix sum crosses u (u in [0, total)).
    std::size_t sample(double u) const;
    std::size_t leaves() const { return leaves_; }

private:
    std::size_t leaves_;
    std::size_t base_;  // index of first leaf in nodes_
    std::vector<double> nodes_;
};

struct SlotId {
    std::uint32_t index = 0;
    std::uint64_t generation = 0;
};

struct SampledTransition {
    SlotId slot;
    const Transition* transition = nullptr;
    double probability = 0.0;  // sampling probability under the active scheme
};

struct PriorityConfig {
    double omega = 0.6;  // priority exponent
    double floor = 1e-3; // keeps every priority strictly positive
};

// Fixed-capacity FIFO store of transitions. Uniform sampling always works;
// when constructed prioritized, sampling follows P(i) = p_i^omega / sum p^omega
// with p_i = last-seen loss + floor, and new entries get the running max
// priority so they are used at least once.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity, bool prioritized = false,
                          PriorityConfig priority = {});

    SlotId push(Transition t);
    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    bool is_prioritized() const { return prioritized_; }
    const Transition& at(std::size_t index) const;

    std::vector<SampledTransition> sample_uniform(std::size_t batch, Rng& rng) const;
    std::vector<SampledTransition> sample_prioritized(std::size_t batch, Rng& rng) const;

    // p_i = loss_i + floor. Slots overwritten since sampling are skipped and
    // counted in the staleness metric.
    void update_priorities(std::span<const SlotId> slots, std::span<const double> losses);
    std::uint64_t stale_update_count() const { return stale_updates_; }

    double max_priority() const { return max_priority_; }
    double priority_of(std::size_t index) const;
    double priority_mass() const;  // sum-tree root (transformed priorities)

    // Importance-sampling weight for a sampled probability; callers opt in.
    static double importance_weight(double probability, std::size_t size, double beta);

    // Dump/restore as checkpoint tensors (a transition table section).
    std::vector<NamedTensor> dump(const std::string& prefix) const;
    static ReplayBuffer restore(const std::vector<NamedTensor>& tensors, const std::string& prefix);

private:
    std::size_t capacity_;
    bool prioritized_;
    PriorityConfig pcfg_;
    std::vector<Transition> slots_;
    std::vector<std::uint64_t> generations_;
    std::vector<double> priorities_;  // raw p_i
    SumTree tree_;
    std::size_t cursor_ = 0;
    std::size_t size_ = 0;
    double max_priority_ = 1.0;
    std::uint64_t stale_updates_ = 0;
    std::uint64_t push_count_ = 0;

    void set_priority(std::size_t index, double raw);
};

}  // namespace ndrl
