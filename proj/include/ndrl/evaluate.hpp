#pragma once

#include <functional>
#include <vector>

#include "ndrl/env.hpp"

namespace ndrl {

struct EvalReport {
    std::vector<double> returns;
    // episode ended at a true terminal (not a time-limit truncation)
    std::vector<bool> reached_terminal;

    double mean() const;
    double stddev() const;
    std::size_t terminal_count() const;
};

// Runs `episodes` greedy episodes; episode k resets with seed base_seed + k.
// Episodes are capped at max_steps when the env itself never terminates.
EvalReport run_greedy_eval(Env& env, const std::function<ActionValue(const Tensor&)>& act,
                           int episodes, std::uint64_t base_seed, int max_steps = 100000);

}  // namespace ndrl
