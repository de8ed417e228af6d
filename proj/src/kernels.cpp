#include "rearing/kernels/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <vector>

#include "rearing/core/parallel.hpp"

namespace rearing::kernels {

namespace {

// One row of C = A[i,:] * B, K accumulation in ascending order.
inline void gemm_nn_row(int N, int K, const float* Arow, const float* B, float* Crow, bool accumulate) {
    if (!accumulate) std::fill(Crow, Crow + N, 0.0f);
    for (int k = 0; k < K; ++k) {
        const float a = Arow[k];
        const float* Bk = B + static_cast<std::size_t>(k) * N;
#pragma omp simd
        for (int j = 0; j < N; ++j) Crow[j] += a * Bk[j];
    }
}

inline void gemm_tn_row(int M, int N, int K, int i, const float* A, const float* B, float* Crow, bool accumulate) {
    if (!accumulate) std::fill(Crow, Crow + N, 0.0f);
    for (int k = 0; k < K; ++k) {
        const float a = A[static_cast<std::size_t>(k) * M + i];
        const float* Bk = B + static_cast<std::size_t>(k) * N;
#pragma omp simd
        for (int j = 0; j < N; ++j) Crow[j] += a * Bk[j];
    }
}

inline void gemm_nt_row(int N, int K, const float* Arow, const float* B, float* Crow, bool accumulate) {
    for (int j = 0; j < N; ++j) {
        const float* Bj = B + static_cast<std::size_t>(j) * K;
        float s = 0.0f;
#pragma omp simd reduction(+ : s)
        for (int k = 0; k < K; ++k) s += Arow[k] * Bj[k];
        Crow[j] = accumulate ? Crow[j] + s : s;
    }
}

thread_local std::vector<float> tls_cols;

}  // namespace

void gemm_nn(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate) {
    par::for_n(M, [&](std::int64_t i) {
        gemm_nn_row(N, K, A + i * K, B, C + i * N, accumulate);
    });
}

void gemm_tn(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate) {
    par::for_n(M, [&](std::int64_t i) {
        gemm_tn_row(M, N, K, static_cast<int>(i), A, B, C + i * N, accumulate);
    });
}

void gemm_nt(int M, int N, int K, const float* A, const float* B, float* C, bool accumulate) {
    par::for_n(M, [&](std::int64_t i) {
        gemm_nt_row(N, K, A + i * K, B, C + i * N, accumulate);
    });
}

void im2col(const float* x, int cin, int h, int w, int kh, int kw, int stride, int pad, float* cols) {
    const int ho = (h + 2 * pad - kh) / stride + 1;
    const int wo = (w + 2 * pad - kw) / stride + 1;
    const int P = ho * wo;
    std::size_t k = 0;
    for (int c = 0; c < cin; ++c) {
        const float* xc = x + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++k) {
                float* row = cols + k * P;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    float* dst = row + static_cast<std::size_t>(oy) * wo;
                    if (iy < 0 || iy >= h) {
                        std::fill(dst, dst + wo, 0.0f);
                        continue;
                    }
                    const float* src = xc + static_cast<std::size_t>(iy) * w;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        dst[ox] = (ix >= 0 && ix < w) ? src[ix] : 0.0f;
                    }
                }
            }
        }
    }
}

void col2im_add(const float* cols, int cin, int h, int w, int kh, int kw, int stride, int pad, float* x) {
    const int ho = (h + 2 * pad - kh) / stride + 1;
    const int wo = (w + 2 * pad - kw) / stride + 1;
    const int P = ho * wo;
    std::size_t k = 0;
    for (int c = 0; c < cin; ++c) {
        float* xc = x + static_cast<std::size_t>(c) * h * w;
        for (int ky = 0; ky < kh; ++ky) {
            for (int kx = 0; kx < kw; ++kx, ++k) {
                const float* row = cols + k * P;
                for (int oy = 0; oy < ho; ++oy) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) continue;
                    float* dst = xc + static_cast<std::size_t>(iy) * w;
                    const float* src = row + static_cast<std::size_t>(oy) * wo;
                    for (int ox = 0; ox < wo; ++ox) {
                        const int ix = ox * stride - pad + kx;
                        if (ix >= 0 && ix < w) dst[ix] += src[ox];
                    }
                }
            }
        }
    }
}

void conv2d_forward(const float* x, const float* weight, const float* bias, float* y, const ConvDims& d) {
    const int K = d.cin * d.kh * d.kw;
    const int P = d.ho() * d.wo();
    par::for_n(d.n, [&](std::int64_t i) {
        tls_cols.resize(static_cast<std::size_t>(K) * P);
        im2col(x + i * static_cast<std::size_t>(d.cin) * d.h * d.w, d.cin, d.h, d.w, d.kh, d.kw, d.stride,
               d.pad, tls_cols.data());
        float* yi = y + i * static_cast<std::size_t>(d.cout) * P;
        for (int co = 0; co < d.cout; ++co) {
            float* row = yi + static_cast<std::size_t>(co) * P;
            std::fill(row, row + P, bias ? bias[co] : 0.0f);
            gemm_nn_row(P, K, weight + static_cast<std::size_t>(co) * K, tls_cols.data(), row, true);
        }
    });
}

void conv2d_backward_input(const float* dy, const float* weight, float* dx, const ConvDims& d) {
    const int K = d.cin * d.kh * d.kw;
    const int P = d.ho() * d.wo();
    par::for_n(d.n, [&](std::int64_t i) {
        tls_cols.resize(static_cast<std::size_t>(K) * P);
        const float* dyi = dy + i * static_cast<std::size_t>(d.cout) * P;
        for (int k = 0; k < K; ++k)
            gemm_tn_row(K, P, d.cout, k, weight, dyi, tls_cols.data() + static_cast<std::size_t>(k) * P, false);
        float* dxi = dx + i * static_cast<std::size_t>(d.cin) * d.h * d.w;
        std::fill(dxi, dxi + static_cast<std::size_t>(d.cin) * d.h * d.w, 0.0f);
        col2im_add(tls_cols.data(), d.cin, d.h, d.w, d.kh, d.kw, d.stride, d.pad, dxi);
    });
}

void conv2d_backward_params(const float* dy, const float* x, float* dweight, float* dbias, const ConvDims& d) {
    const int K = d.cin * d.kh * d.kw;
    const int P = d.ho() * d.wo();
    std::fill(dweight, dweight + static_cast<std::size_t>(d.cout) * K, 0.0f);
    if (dbias) std::fill(dbias, dbias + d.cout, 0.0f);
    std::vector<float> cols(static_cast<std::size_t>(K) * P);
    // Samples are accumulated in order; parallelism lives in the per-sample GEMM rows.
    for (int i = 0; i < d.n; ++i) {
        im2col(x + static_cast<std::size_t>(i) * d.cin * d.h * d.w, d.cin, d.h, d.w, d.kh, d.kw, d.stride,
               d.pad, cols.data());
        const float* dyi = dy + static_cast<std::size_t>(i) * d.cout * P;
        par::for_n(d.cout, [&](std::int64_t co) {
            gemm_nt_row(K, P, dyi + co * P, cols.data(), dweight + co * K, true);
            if (dbias) {
                const float* row = dyi + co * P;
                float s = 0.0f;
#pragma omp simd reduction(+ : s)
                for (int p = 0; p < P; ++p) s += row[p];
                dbias[co] += s;
            }
        });
    }
}

void bn_forward(float* y, const float* x, int n, int c, int hw,
                const float* gamma, const float* beta,
                float* running_mean, float* running_var, float momentum, float eps,
                bool training, float* save_mean, float* save_invstd) {
    const std::int64_t plane = static_cast<std::int64_t>(c) * hw;
    const std::int64_t m = static_cast<std::int64_t>(n) * hw;
    par::for_n(c, [&](std::int64_t ci) {
        float mean, invstd;
        if (training) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
                const float* p = x + i * plane + ci * hw;
                for (int j = 0; j < hw; ++j) s += p[j];
            }
            mean = static_cast<float>(s / static_cast<double>(m));
            double v = 0.0;
            for (int i = 0; i < n; ++i) {
                const float* p = x + i * plane + ci * hw;
                for (int j = 0; j < hw; ++j) {
                    const double dlt = p[j] - mean;
                    v += dlt * dlt;
                }
            }
            const double var = v / static_cast<double>(m);
            invstd = static_cast<float>(1.0 / std::sqrt(var + eps));
            if (running_mean) {
                const double unbiased = (m > 1) ? v / static_cast<double>(m - 1) : var;
                running_mean[ci] = (1.0f - momentum) * running_mean[ci] + momentum * mean;
                running_var[ci] = (1.0f - momentum) * running_var[ci] + momentum * static_cast<float>(unbiased);
            }
            if (save_mean) save_mean[ci] = mean;
            if (save_invstd) save_invstd[ci] = invstd;
        } else {
            mean = running_mean[ci];
            invstd = 1.0f / std::sqrt(running_var[ci] + eps);
        }
        const float g = gamma ? gamma[ci] : 1.0f;
        const float b = beta ? beta[ci] : 0.0f;
        const float a = g * invstd;
        const float shift = b - a * mean;
        for (int i = 0; i < n; ++i) {
            const float* p = x + i * plane + ci * hw;
            float* q = y + i * plane + ci * hw;
#pragma omp simd
            for (int j = 0; j < hw; ++j) q[j] = a * p[j] + shift;
        }
    });
}

void bn_backward(float* dx, float* dgamma, float* dbeta,
                 const float* dy, const float* x, int n, int c, int hw,
                 const float* gamma, const float* save_mean, const float* save_invstd) {
    const std::int64_t plane = static_cast<std::int64_t>(c) * hw;
    const double m = static_cast<double>(n) * hw;
    par::for_n(c, [&](std::int64_t ci) {
        const float mean = save_mean[ci];
        const float invstd = save_invstd[ci];
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (int i = 0; i < n; ++i) {
            const float* py = dy + i * plane + ci * hw;
            const float* px = x + i * plane + ci * hw;
            for (int j = 0; j < hw; ++j) {
                sum_dy += py[j];
                sum_dy_xhat += py[j] * ((px[j] - mean) * invstd);
            }
        }
        if (dgamma) dgamma[ci] = static_cast<float>(sum_dy_xhat);
        if (dbeta) dbeta[ci] = static_cast<float>(sum_dy);
        const float g = gamma ? gamma[ci] : 1.0f;
        const float k1 = static_cast<float>(sum_dy / m);
        const float k2 = static_cast<float>(sum_dy_xhat / m);
        for (int i = 0; i < n; ++i) {
            const float* py = dy + i * plane + ci * hw;
            const float* px = x + i * plane + ci * hw;
            float* pd = dx + i * plane + ci * hw;
#pragma omp simd
            for (int j = 0; j < hw; ++j) {
                const float xhat = (px[j] - mean) * invstd;
                pd[j] = g * invstd * (py[j] - k1 - xhat * k2);
            }
        }
    });
}

void relu_forward(float* y, const float* x, std::int64_t n) {
    par::for_n((n + 65535) / 65536, [&](std::int64_t blk) {
        const std::int64_t lo = blk * 65536, hi = std::min<std::int64_t>(n, lo + 65536);
#pragma omp simd
        for (std::int64_t i = lo; i < hi; ++i) y[i] = x[i] > 0.0f ? x[i] : 0.0f;
    });
}

void relu_backward(float* dx, const float* dy, const float* y, std::int64_t n) {
    par::for_n((n + 65535) / 65536, [&](std::int64_t blk) {
        const std::int64_t lo = blk * 65536, hi = std::min<std::int64_t>(n, lo + 65536);
#pragma omp simd
        for (std::int64_t i = lo; i < hi; ++i) dx[i] = y[i] > 0.0f ? dy[i] : 0.0f;
    });
}

void sigmoid_forward(float* y, const float* x, std::int64_t n) {
    par::for_n((n + 16383) / 16384, [&](std::int64_t blk) {
        const std::int64_t lo = blk * 16384, hi = std::min<std::int64_t>(n, lo + 16384);
        for (std::int64_t i = lo; i < hi; ++i) y[i] = 1.0f / (1.0f + std::exp(-x[i]));
    });
}

void sigmoid_backward(float* dx, const float* dy, const float* y, std::int64_t n) {
    par::for_n((n + 65535) / 65536, [&](std::int64_t blk) {
        const std::int64_t lo = blk * 65536, hi = std::min<std::int64_t>(n, lo + 65536);
#pragma omp simd
        for (std::int64_t i = lo; i < hi; ++i) dx[i] = dy[i] * y[i] * (1.0f - y[i]);
    });
}

void add_inplace(float* a, const float* b, std::int64_t n) {
#pragma omp simd
    for (std::int64_t i = 0; i < n; ++i) a[i] += b[i];
}

void maxpool_forward(float* y, std::int32_t* argmax, const float* x,
                     int n, int c, int h, int w, int k, int stride, int pad) {
    const int ho = (h + 2 * pad - k) / stride + 1;
    const int wo = (w + 2 * pad - k) / stride + 1;
    par::for_n(static_cast<std::int64_t>(n) * c, [&](std::int64_t nc) {
        const float* xp = x + nc * h * w;
        float* yp = y + nc * ho * wo;
        std::int32_t* ap = argmax + nc * ho * wo;
        for (int oy = 0; oy < ho; ++oy) {
            for (int ox = 0; ox < wo; ++ox) {
                float best = -std::numeric_limits<float>::infinity();
                std::int32_t bi = -1;
                for (int ky = 0; ky < k; ++ky) {
                    const int iy = oy * stride - pad + ky;
                    if (iy < 0 || iy >= h) continue;
                    for (int kx = 0; kx < k; ++kx) {
                        const int ix = ox * stride - pad + kx;
                        if (ix < 0 || ix >= w) continue;
                        const float v = xp[iy * w + ix];
                        if (v > best) {
                            best = v;
                            bi = iy * w + ix;
                        }
                    }
                }
                yp[oy * wo + ox] = bi >= 0 ? best : 0.0f;
                ap[oy * wo + ox] = bi;
            }
        }
    });
}

void maxpool_backward(float* dx, const float* dy, const std::int32_t* argmax,
                      int n, int c, int h, int w, int k, int stride, int pad) {
    const int ho = (h + 2 * pad - k) / stride + 1;
    const int wo = (w + 2 * pad - k) / stride + 1;
    par::for_n(static_cast<std::int64_t>(n) * c, [&](std::int64_t nc) {
        float* dxp = dx + nc * h * w;
        std::fill(dxp, dxp + static_cast<std::size_t>(h) * w, 0.0f);
        const float* dyp = dy + nc * ho * wo;
        const std::int32_t* ap = argmax + nc * ho * wo;
        for (int p = 0; p < ho * wo; ++p)
            if (ap[p] >= 0) dxp[ap[p]] += dyp[p];
    });
}

void global_avg_pool_forward(float* y, const float* x, int n, int c, int hw) {
    par::for_n(static_cast<std::int64_t>(n) * c, [&](std::int64_t nc) {
        const float* p = x + nc * hw;
        double s = 0.0;
        for (int j = 0; j < hw; ++j) s += p[j];
        y[nc] = static_cast<float>(s / hw);
    });
}

void global_avg_pool_backward(float* dx, const float* dy, int n, int c, int hw) {
    par::for_n(static_cast<std::int64_t>(n) * c, [&](std::int64_t nc) {
        const float g = dy[nc] / static_cast<float>(hw);
        float* p = dx + nc * hw;
#pragma omp simd
        for (int j = 0; j < hw; ++j) p[j] = g;
    });
}

void linear_forward(float* y, const float* x, const float* w, const float* b, int n, int in, int out) {
    gemm_nt(n, out, in, x, w, y, false);
    if (b) {
        par::for_n(n, [&](std::int64_t i) {
            float* row = y + i * out;
#pragma omp simd
            for (int j = 0; j < out; ++j) row[j] += b[j];
        });
    }
}

void linear_backward(float* dx, float* dw, float* db, const float* dy, const float* x, const float* w,
                     int n, int in, int out) {
    if (dx) gemm_nn(n, in, out, dy, w, dx, false);
    if (dw) gemm_tn(out, in, n, dy, x, dw, false);
    if (db) {
        par::for_n(out, [&](std::int64_t j) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) s += dy[static_cast<std::size_t>(i) * out + j];
            db[j] = static_cast<float>(s);
        });
    }
}

void upsample2x_forward(float* y, const float* x, int n, int c, int h, int w) {
    par::for_n(static_cast<std::int64_t>(n) * c, [&](std::int64_t nc) {
        const float* xp = x + nc * h * w;
        float* yp = y + nc * (2 * h) * (2 * w);
        for (int i = 0; i < 2 * h; ++i) {
            const float* src = xp + (i / 2) * w;
            float* dst = yp + static_cast<std::size_t>(i) * 2 * w;
            for (int j = 0; j < 2 * w; ++j) dst[j] = src[j / 2];
        }
    });
}

void upsample2x_backward(float* dx, const float* dy, int n, int c, int h, int w) {
    par::for_n(static_cast<std::int64_t>(n) * c, [&](std::int64_t nc) {
        float* dxp = dx + nc * h * w;
        const float* dyp = dy + nc * (2 * h) * (2 * w);
        for (int i = 0; i < h; ++i) {
            for (int j = 0; j < w; ++j) {
                const float* r0 = dyp + static_cast<std::size_t>(2 * i) * 2 * w + 2 * j;
                const float* r1 = dyp + static_cast<std::size_t>(2 * i + 1) * 2 * w + 2 * j;
                dxp[i * w + j] = (r0[0] + r0[1]) + (r1[0] + r1[1]);
            }
        }
    });
}

}  // namespace rearing::kernels
