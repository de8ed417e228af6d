#include "rearing/learn/optim.hpp"

#include <stdexcept>

namespace rearing::learn {

SgdMomentum::SgdMomentum(std::vector<Param*> params, double momentum, double weight_decay)
    : params_(std::move(params)), mu_(momentum), wd_(weight_decay) {
    if (momentum < 0.0 || momentum >= 1.0) {
        throw std::invalid_argument("SgdMomentum: momentum must be in [0,1)");
    }
    if (weight_decay < 0.0) throw std::invalid_argument("SgdMomentum: weight_decay must be >= 0");
    velocity_.reserve(params_.size());
    for (Param* p : params_) velocity_.emplace_back(p->w.shape);
}

void SgdMomentum::zero_grad() {
    for (Param* p : params_) p->g.zero();
}

void SgdMomentum::step(double lr) {
    const float mu = static_cast<float>(mu_);
    const float wd = static_cast<float>(wd_);
    const float eta = static_cast<float>(lr);
    for (std::size_t i = 0; i < params_.size(); ++i) {
        float* w = params_[i]->w.data();
        const float* g = params_[i]->g.data();
        float* v = velocity_[i].data();
        const std::int64_t n = params_[i]->w.numel();
        for (std::int64_t j = 0; j < n; ++j) {
            const float grad = g[j] + wd * w[j];
            v[j] = mu * v[j] + grad;
            w[j] -= eta * v[j];
        }
    }
}

}  // namespace rearing::learn
