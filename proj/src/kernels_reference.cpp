#include "rearing/kernels/reference.hpp"

#include <algorithm>
#include <cmath>

namespace rearing::kernels::reference {

void gemm_nn(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate) {
    for (int i = 0; i < M; ++i) {
        for (int j = 0; j < N; ++j) {
            float s = accumulate ? C[static_cast<std::size_t>(i) * N + j] : 0.0f;
            for (int k = 0; k < K; ++k)
                s += A[static_cast<std::size_t>(i) * K + k] * B[static_cast<std::size_t>(k) * N + j];
            C[static_cast<std::size_t>(i) * N + j] = s;
        }
    }
}

void conv2d_forward(const float* x, const float* weight, const float* bias, float* y, const ConvDims& d) {
    const int ho = d.ho(), wo = d.wo();
    for (int i = 0; i < d.n; ++i) {
        for (int co = 0; co < d.cout; ++co) {
            for (int oy = 0; oy < ho; ++oy) {
                for (int ox = 0; ox < wo; ++ox) {
                    float s = bias ? bias[co] : 0.0f;
                    for (int ci = 0; ci < d.cin; ++ci) {
                        for (int ky = 0; ky < d.kh; ++ky) {
                            const int iy = oy * d.stride - d.pad + ky;
                            if (iy < 0 || iy >= d.h) continue;
                            for (int kx = 0; kx < d.kw; ++kx) {
                                const int ix = ox * d.stride - d.pad + kx;
                                if (ix < 0 || ix >= d.w) continue;
                                s += x[((static_cast<std::size_t>(i) * d.cin + ci) * d.h + iy) * d.w + ix] *
                                     weight[((static_cast<std::size_t>(co) * d.cin + ci) * d.kh + ky) * d.kw + kx];
                            }
                        }
                    }
                    y[((static_cast<std::size_t>(i) * d.cout + co) * ho + oy) * wo + ox] = s;
                }
            }
        }
    }
}

void conv2d_backward_input(const float* dy, const float* weight, float* dx, const ConvDims& d) {
    const int ho = d.ho(), wo = d.wo();
    std::fill(dx, dx + static_cast<std::size_t>(d.n) * d.cin * d.h * d.w, 0.0f);
    for (int i = 0; i < d.n; ++i)
        for (int co = 0; co < d.cout; ++co)
            for (int oy = 0; oy < ho; ++oy)
                for (int ox = 0; ox < wo; ++ox) {
                    const float g = dy[((static_cast<std::size_t>(i) * d.cout + co) * ho + oy) * wo + ox];
                    for (int ci = 0; ci < d.cin; ++ci)
                        for (int ky = 0; ky < d.kh; ++ky) {
                            const int iy = oy * d.stride - d.pad + ky;
                            if (iy < 0 || iy >= d.h) continue;
                            for (int kx = 0; kx < d.kw; ++kx) {
                                const int ix = ox * d.stride - d.pad + kx;
                                if (ix < 0 || ix >= d.w) continue;
                                dx[((static_cast<std::size_t>(i) * d.cin + ci) * d.h + iy) * d.w + ix] +=
                                    g * weight[((static_cast<std::size_t>(co) * d.cin + ci) * d.kh + ky) * d.kw + kx];
                            }
                        }
                }
}

void conv2d_backward_params(const float* dy, const float* x, float* dweight, float* dbias, const ConvDims& d) {
    const int ho = d.ho(), wo = d.wo();
    std::fill(dweight, dweight + static_cast<std::size_t>(d.cout) * d.cin * d.kh * d.kw, 0.0f);
    if (dbias) std::fill(dbias, dbias + d.cout, 0.0f);
    for (int i = 0; i < d.n; ++i)
        for (int co = 0; co < d.cout; ++co)
            for (int oy = 0; oy < ho; ++oy)
                for (int ox = 0; ox < wo; ++ox) {
                    const float g = dy[((static_cast<std::size_t>(i) * d.cout + co) * ho + oy) * wo + ox];
                    if (dbias) dbias[co] += g;
                    for (int ci = 0; ci < d.cin; ++ci)
                        for (int ky = 0; ky < d.kh; ++ky) {
                            const int iy = oy * d.stride - d.pad + ky;
                            if (iy < 0 || iy >= d.h) continue;
                            for (int kx = 0; kx < d.kw; ++kx) {
                                const int ix = ox * d.stride - d.pad + kx;
                                if (ix < 0 || ix >= d.w) continue;
                                dweight[((static_cast<std::size_t>(co) * d.cin + ci) * d.kh + ky) * d.kw + kx] +=
                                    g * x[((static_cast<std::size_t>(i) * d.cin + ci) * d.h + iy) * d.w + ix];
                            }
                        }
                }
}

void bn_forward_train(float* y, const float* x, int n, int c, int hw,
                      const float* gamma, const float* beta, float eps,
                      float* save_mean, float* save_invstd) {
    const std::int64_t plane = static_cast<std::int64_t>(c) * hw;
    const double m = static_cast<double>(n) * hw;
    for (int ci = 0; ci < c; ++ci) {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < hw; ++j) s += x[i * plane + static_cast<std::int64_t>(ci) * hw + j];
        const double mean = s / m;
        double v = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < hw; ++j) {
                const double dlt = x[i * plane + static_cast<std::int64_t>(ci) * hw + j] - mean;
                v += dlt * dlt;
            }
        const double invstd = 1.0 / std::sqrt(v / m + eps);
        if (save_mean) save_mean[ci] = static_cast<float>(mean);
        if (save_invstd) save_invstd[ci] = static_cast<float>(invstd);
        const double g = gamma ? gamma[ci] : 1.0;
        const double b = beta ? beta[ci] : 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < hw; ++j) {
                const std::int64_t idx = i * plane + static_cast<std::int64_t>(ci) * hw + j;
                y[idx] = static_cast<float>(g * ((x[idx] - mean) * invstd) + b);
            }
    }
}

}  // namespace rearing::kernels::reference
