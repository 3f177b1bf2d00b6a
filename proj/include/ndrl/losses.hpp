#pragma once

#include <span>
#include <vector>

#include "ndrl/tensor.hpp"

namespace ndrl {

struct LossResult {
    double value = 0.0;
    Tensor grad;  // w.r.t. the first argument
};

// Mean of squared elementwise differences; grad = 2(pred - target)/n.
LossResult mse_loss(const Tensor& pred, const Tensor& target);

// -log softmax(logits)[label], stabilized by max subtraction.
// grad = softmax(logits) - onehot(label).
LossResult cross_entropy_loss(const Tensor& logits, int label);

std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);
double log_sum_exp(std::span<const double> v);

}  // namespace ndrl
