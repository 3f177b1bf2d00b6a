#include "ndrl/losses.hpp"

#include <algorithm>
#include <cmath>

#include "ndrl/errors.hpp"

namespace ndrl {

LossResult mse_loss(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "mse_loss");
    std::size_t n = pred.numel();
    LossResult out;
    out.grad = Tensor::zeros(pred.shape);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = pred[i] - target[i];
        sum += d * d;
        out.grad[i] = 2.0 * d / static_cast<double>(n);
    }
    out.value = sum / static_cast<double>(n);
    return out;
}

LossResult cross_entropy_loss(const Tensor& logits, int label) {
    if (label < 0 || static_cast<std::size_t>(label) >= logits.numel()) {
        throw IndexError("cross_entropy_loss: label " + std::to_string(label) +
                         " out of range for " + std::to_string(logits.numel()) + " logits");
    }
    std::vector<double> logp = log_softmax(logits.data);
    LossResult out;
    out.value = -logp[static_cast<std::size_t>(label)];
    out.grad = Tensor::zeros(logits.shape);
    for (std::size_t i = 0; i < logits.numel(); ++i) out.grad[i] = std::exp(logp[i]);
    out.grad[static_cast<std::size_t>(label)] -= 1.0;
    return out;
}

double log_sum_exp(std::span<const double> v) {
    double m = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

std::vector<double> log_softmax(std::span<const double> logits) {
    double lse = log_sum_exp(logits);
    std::vector<double> out(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
    return out;
}

std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out = log_softmax(logits);
    for (double& x : out) x = std::exp(x);
    return out;
}

}  // namespace ndrl
