#pragma once

#include <vector>

#include "rearing/learn/layers.hpp"

namespace rearing::learn {

/// SGD with classical momentum: v = mu*v + (g + wd*w); w -= lr*v.
class SgdMomentum {
public:
    SgdMomentum(std::vector<Param*> params, double momentum, double weight_decay);
    void zero_grad();
    void step(double lr);

private:
    std::vector<Param*> params_;
    std::vector<Tensor> velocity_;
    double mu_, wd_;
};

}  // namespace rearing::learn
