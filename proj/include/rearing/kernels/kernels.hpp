#pragma once

#include <cstdint>

namespace rearing::kernels {

/// Convolution geometry. NCHW activations, [cout, cin, kh, kw] weights.
struct ConvDims {
    int n = 0, cin = 0, h = 0, w = 0;
    int cout = 0, kh = 0, kw = 0;
    int stride = 1, pad = 0;
    int ho() const { return (h + 2 * pad - kh) / stride + 1; }
    int wo() const { return (w + 2 * pad - kw) / stride + 1; }
};

// Row-major GEMM. C[M x N] = A[M x K] * op(B); rows of C are computed
// independently and the K accumulation order is fixed, so results do not
// depend on the execution mode.
void gemm_nn(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate);
void gemm_tn(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate);  // C = A^T[MxK] * B, A is [K x M]
void gemm_nt(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate);  // C = A * B^T, B is [N x K]

void im2col(const float* x, int cin, int h, int w, int kh, int kw, int stride, int pad, float* cols);
void col2im_add(const float* cols, int cin, int h, int w, int kh, int kw, int stride, int pad, float* x);

void conv2d_forward(const float* x, const float* weight, const float* bias, float* y, const ConvDims& d);
void conv2d_backward_input(const float* dy, const float* weight, float* dx, const ConvDims& d);
void conv2d_backward_params(const float* dy, const float* x, float* dweight, float* dbias, const ConvDims& d);

// Batch normalization over (n, hw) per channel.
void bn_forward(float* y, const float* x, int n, int c, int hw,
                const float* gamma, const float* beta,
                float* running_mean, float* running_var, float momentum, float eps,
                bool training, float* save_mean, float* save_invstd);
void bn_backward(float* dx, float* dgamma, float* dbeta,
                 const float* dy, const float* x, int n, int c, int hw,
                 const float* gamma, const float* save_mean, const float* save_invstd);

void relu_forward(float* y, const float* x, std::int64_t n);
void relu_backward(float* dx, const float* dy, const float* y, std::int64_t n);  // masks where y > 0

void sigmoid_forward(float* y, const float* x, std::int64_t n);
void sigmoid_backward(float* dx, const float* dy, const float* y, std::int64_t n);

void add_inplace(float* a, const float* b, std::int64_t n);

void maxpool_forward(float* y, std::int32_t* argmax, const float* x,
                     int n, int c, int h, int w, int k, int stride, int pad);
void maxpool_backward(float* dx, const float* dy, const std::int32_t* argmax,
                      int n, int c, int h, int w, int k, int stride, int pad);

void global_avg_pool_forward(float* y, const float* x, int n, int c, int hw);
void global_avg_pool_backward(float* dx, const float* dy, int n, int c, int hw);

// Fully connected: y[n x out] = x[n x in] * w^T + b, w is [out x in].
void linear_forward(float* y, const float* x, const float* w, const float* b, int n, int in, int out);
void linear_backward(float* dx, float* dw, float* db, const float* dy, const float* x, const float* w,
                     int n, int in, int out);

// Nearest-neighbour 2x upsampling.
void upsample2x_forward(float* y, const float* x, int n, int c, int h, int w);
void upsample2x_backward(float* dx, const float* dy, int n, int c, int h, int w);

}  // namespace rearing::kernels
