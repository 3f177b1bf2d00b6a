#include "ndrl/evaluate.hpp"

#include <cmath>

namespace ndrl {

double EvalReport::mean() const {
    if (returns.empty()) return 0.0;
    double s = 0.0;
    for (double r : returns) s += r;
    return s / static_cast<double>(returns.size());
}

double EvalReport::stddev() const {
    if (returns.size() < 2) return 0.0;
    double m = mean();
    double s = 0.0;
    for (double r : returns) s += (r - m) * (r - m);
    return std::sqrt(s / static_cast<double>(returns.size()));
}

std::size_t EvalReport::terminal_count() const {
    std::size_t n = 0;
    for (bool b : reached_terminal) {
        if (b) ++n;
    }
    return n;
}

EvalReport run_greedy_eval(Env& env, const std::function<ActionValue(const Tensor&)>& act,
                           int episodes, std::uint64_t base_seed, int max_steps) {
    EvalReport report;
    for (int ep = 0; ep < episodes; ++ep) {
        Tensor s = env.reset(base_seed + static_cast<std::uint64_t>(ep));
        double total = 0.0;
        bool terminal = false;
        for (int t = 0; t < max_steps; ++t) {
            StepResult r = env.step(act(s));
            total += r.reward;
            if (r.done) {
                terminal = !r.truncated;
                break;
            }
            s = r.next_state;
        }
        report.returns.push_back(total);
        report.reached_terminal.push_back(terminal);
    }
    return report;
}

}  // namespace ndrl
