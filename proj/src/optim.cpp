#include "ndrl/optim.hpp"

#include <cmath>

#include "ndrl/errors.hpp"

namespace ndrl {

void AdamState::step(std::vector<Mlp::TensorRef> refs) {
    if (m_.empty()) {
        m_.resize(refs.size());
        v_.resize(refs.size());
        for (std::size_t i = 0; i < refs.size(); ++i) {
            m_[i].assign(refs[i].value.size(), 0.0);
            v_[i].assign(refs[i].value.size(), 0.0);
        }
    }
    if (refs.size() != m_.size()) {
        throw DimensionError("adam_step: tensor list changed size since first step");
    }
    for (std::size_t i = 0; i < refs.size(); ++i) {
        if (refs[i].value.size() != m_[i].size()) {
            throw DimensionError("adam_step: shape of '" + refs[i].name +
                                 "' changed since first step");
        }
        for (double g : refs[i].grad) {
            if (!std::isfinite(g)) {
                throw DivergenceError(refs[i].name,
                                      "non-finite gradient in parameter '" + refs[i].name + "'");
            }
        }
    }

    if (cfg_.clip_norm > 0.0) {
        double sq = 0.0;
        for (const auto& r : refs) {
            for (double g : r.grad) sq += g * g;
        }
        double norm = std::sqrt(sq);
        if (norm > cfg_.clip_norm) {
            double scale = cfg_.clip_norm / norm;
            for (auto& r : refs) {
                for (double& g : r.grad) g *= scale;
            }
        }
    }

    ++t_;
    double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < refs.size(); ++i) {
        auto& m = m_[i];
        auto& v = v_[i];
        auto value = refs[i].value;
        auto grad = refs[i].grad;
        for (std::size_t k = 0; k < value.size(); ++k) {
            double g = grad[k];
            m[k] = cfg_.beta1 * m[k] + (1.0 - cfg_.beta1) * g;
            v[k] = cfg_.beta2 * v[k] + (1.0 - cfg_.beta2) * g * g;
            double mhat = m[k] / bc1;
            double vhat = v[k] / bc2;
            value[k] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
            grad[k] = 0.0;
        }
    }
}

void adam_step(std::vector<Mlp::TensorRef> refs, AdamState& state) { state.step(std::move(refs)); }

}  // namespace ndrl
