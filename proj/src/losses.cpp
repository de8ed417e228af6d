#include "rearing/learn/losses.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "rearing/core/errors.hpp"

namespace rearing::learn {

LossGrad mse_loss(const Tensor& pred, const Tensor& target) {
    require_same_shape(pred, target, "mse_loss");
    const std::int64_t n = pred.numel();
    if (n == 0) throw std::invalid_argument("mse_loss: empty input");
    LossGrad out;
    out.grad = Tensor(pred.shape);
    double acc = 0.0;
    const double scale = 2.0 / static_cast<double>(n);
    for (std::int64_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pred[i]) - static_cast<double>(target[i]);
        acc += d * d;
        out.grad[i] = static_cast<float>(scale * d);
    }
    out.loss = acc / static_cast<double>(n);
    return out;
}

namespace {

/// Row norms with a hard zero check; normalized rows returned in double.
std::vector<double> normalize_rows(const Tensor& z, std::vector<double>& norms, const char* what) {
    const int m = z.dim(0), k = z.dim(1);
    std::vector<double> zh(static_cast<std::size_t>(m) * k);
    norms.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        double s = 0.0;
        for (int j = 0; j < k; ++j) {
            const double v = z[static_cast<std::int64_t>(i) * k + j];
            s += v * v;
        }
        const double r = std::sqrt(s);
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw NumericError(std::string(what) + ": zero or non-finite embedding norm at row " +
                               std::to_string(i));
        }
        norms[static_cast<std::size_t>(i)] = r;
        for (int j = 0; j < k; ++j) {
            zh[static_cast<std::size_t>(i) * k + j] = z[static_cast<std::int64_t>(i) * k + j] / r;
        }
    }
    return zh;
}

}  // namespace

LossGrad nt_xent_loss(const Tensor& z, double tau) {
    if (z.ndim() != 2) throw std::invalid_argument("nt_xent_loss: expected [2N,K], got " + z.shape_str());
    const int m = z.dim(0), k = z.dim(1);
    if (m < 2 || m % 2 != 0) {
        throw std::invalid_argument("nt_xent_loss: row count must be even and >= 2");
    }
    if (!(tau > 0.0)) throw std::invalid_argument("nt_xent_loss: tau must be positive");
    const int n = m / 2;

    std::vector<double> norms;
    std::vector<double> zh = normalize_rows(z, norms, "nt_xent_loss");

    // Cosine similarity matrix scaled by temperature.
    std::vector<double> s(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            double acc = 0.0;
            for (int c = 0; c < k; ++c) acc += zh[static_cast<std::size_t>(i) * k + c] * zh[static_cast<std::size_t>(j) * k + c];
            s[static_cast<std::size_t>(i) * m + j] = acc / tau;
        }
    }

    // Per-anchor cross entropy against the positive, negatives are every other row.
    std::vector<double> g(static_cast<std::size_t>(m) * m, 0.0);
    double loss = 0.0;
    const double w = 1.0 / static_cast<double>(m);
    for (int i = 0; i < m; ++i) {
        const int pos = (i + n) % m;
        double rowmax = -1e300;
        for (int j = 0; j < m; ++j) {
            if (j != i) rowmax = std::max(rowmax, s[static_cast<std::size_t>(i) * m + j]);
        }
        double denom = 0.0;
        for (int j = 0; j < m; ++j) {
            if (j != i) denom += std::exp(s[static_cast<std::size_t>(i) * m + j] - rowmax);
        }
        loss += w * (-(s[static_cast<std::size_t>(i) * m + pos] - rowmax) + std::log(denom));
        for (int j = 0; j < m; ++j) {
            if (j == i) continue;
            const double p = std::exp(s[static_cast<std::size_t>(i) * m + j] - rowmax) / denom;
            g[static_cast<std::size_t>(i) * m + j] = w * (p - (j == pos ? 1.0 : 0.0));
        }
    }

    // d loss / d zhat = (G + G^T) Zhat / tau, then back through the row normalization.
    LossGrad out;
    out.loss = loss;
    out.grad = Tensor(z.shape);
    for (int i = 0; i < m; ++i) {
        std::vector<double> u(static_cast<std::size_t>(k), 0.0);
        for (int j = 0; j < m; ++j) {
            const double gij = g[static_cast<std::size_t>(i) * m + j] + g[static_cast<std::size_t>(j) * m + i];
            if (gij == 0.0) continue;
            for (int c = 0; c < k; ++c) u[static_cast<std::size_t>(c)] += gij * zh[static_cast<std::size_t>(j) * k + c];
        }
        double dot = 0.0;
        for (int c = 0; c < k; ++c) dot += u[static_cast<std::size_t>(c)] * zh[static_cast<std::size_t>(i) * k + c];
        const double inv_r = 1.0 / norms[static_cast<std::size_t>(i)];
        for (int c = 0; c < k; ++c) {
            out.grad[static_cast<std::int64_t>(i) * k + c] = static_cast<float>(
                (u[static_cast<std::size_t>(c)] - dot * zh[static_cast<std::size_t>(i) * k + c]) * inv_r / tau);
        }
    }
    return out;
}

LossGrad byol_loss(const Tensor& p, const Tensor& zt) {
    require_same_shape(p, zt, "byol_loss");
    if (p.ndim() != 2) throw std::invalid_argument("byol_loss: expected [M,K], got " + p.shape_str());
    const int m = p.dim(0), k = p.dim(1);
    if (m < 1) throw std::invalid_argument("byol_loss: empty batch");

    std::vector<double> pn, tn;
    std::vector<double> ph = normalize_rows(p, pn, "byol_loss");
    std::vector<double> th = normalize_rows(zt, tn, "byol_loss");

    LossGrad out;
    out.grad = Tensor(p.shape);
    double acc = 0.0;
    const double w = 1.0 / static_cast<double>(m);
    for (int i = 0; i < m; ++i) {
        double cos = 0.0;
        for (int c = 0; c < k; ++c) cos += ph[static_cast<std::size_t>(i) * k + c] * th[static_cast<std::size_t>(i) * k + c];
        acc += w * (2.0 - 2.0 * cos);
        const double s = -2.0 * w / pn[static_cast<std::size_t>(i)];
        for (int c = 0; c < k; ++c) {
            out.grad[static_cast<std::int64_t>(i) * k + c] = static_cast<float>(
                s * (th[static_cast<std::size_t>(i) * k + c] - cos * ph[static_cast<std::size_t>(i) * k + c]));
        }
    }
    out.loss = acc;
    return out;
}

}  // namespace rearing::learn
