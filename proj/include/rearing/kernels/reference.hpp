#pragma once

#include "rearing/kernels/kernels.hpp"

namespace rearing::kernels::reference {

// Plain-loop serial implementations. These are the readable versions of the
// optimized kernels and serve as the independent oracle in tests and as the
// baseline in the kernel benchmark. They are never called from the training
// path.

void gemm_nn(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate);

void conv2d_forward(const float* x, const float* weight, const float* bias, float* y, const ConvDims& d);
void conv2d_backward_input(const float* dy, const float* weight, float* dx, const ConvDims& d);
void conv2d_backward_params(const float* dy, const float* x, float* dweight, float* dbias, const ConvDims& d);

void bn_forward_train(float* y, const float* x, int n, int c, int hw,
                      const float* gamma, const float* beta, float eps,
                      float* save_mean, float* save_invstd);

}  // namespace rearing::kernels::reference
