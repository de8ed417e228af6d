#pragma once

#include "rearing/core/tensor.hpp"

namespace rearing::learn {

struct LossGrad {
    double loss = 0.0;
    Tensor grad;  // d loss / d input, same shape as the differentiated input
};

/// Mean squared error over all elements. Gradient is with respect to pred.
LossGrad mse_loss(const Tensor& pred, const Tensor& target);

/// Normalized-temperature cross entropy on an embedding stack z of shape
/// [2N, K] where rows i and i+N are the two views of sample i. Cosine
/// similarities, temperature tau, mean over all 2N anchors. Throws
/// NumericError on a zero-norm row. N == 1 has no negatives and the loss is 0.
LossGrad nt_xent_loss(const Tensor& z, double tau);

/// Regression term between online predictions p and target projections zt,
/// rows already aligned: loss = mean_i (2 - 2 cos(p_i, zt_i)), each term in
/// [0, 4]. Gradient flows to p only; zt is treated as constant.
LossGrad byol_loss(const Tensor& p, const Tensor& zt);

}  // namespace rearing::learn
