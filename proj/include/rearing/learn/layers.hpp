#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "rearing/core/rng.hpp"
#include "rearing/core/tensor.hpp"
#include "rearing/kernels/kernels.hpp"

namespace rearing::learn {

struct Param {
    std::string name;
    Tensor w;  // value
    Tensor g;  // gradient, same shape, overwritten by each backward pass
};

/// Named persistent state that is not optimized (BN running stats).
using BufferRef = std::pair<std::string, Tensor*>;

class Layer {
public:
    virtual ~Layer() = default;
    /// Caches whatever backward needs. One forward per backward.
    virtual Tensor forward(const Tensor& x, bool training) = 0;
    virtual Tensor backward(const Tensor& dy) = 0;
    virtual void collect_params(std::vector<Param*>&) {}
    virtual void collect_buffers(std::vector<BufferRef>&) {}
    /// He-style init; draws from rng in registration order, so a fixed
    /// architecture plus a fixed seed gives identical weights.
    virtual void init_params(Pcg32&) {}
};

class Conv2d : public Layer {
public:
    Conv2d(std::string name, int cin, int cout, int k, int stride, int pad, bool bias);
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void init_params(Pcg32& rng) override;

    Param weight, bias;
    bool has_bias;

private:
    int cin_, cout_, k_, stride_, pad_;
    Tensor x_;
};

/// Batch normalization. Accepts [n,c,h,w] or [n,c] input.
class BatchNorm2d : public Layer {
public:
    BatchNorm2d(std::string name, int c, double momentum = 0.1, double eps = 1e-5);
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void collect_buffers(std::vector<BufferRef>& bs) override;
    void init_params(Pcg32& rng) override;

    Param gamma, beta;
    Tensor running_mean, running_var;

private:
    int c_;
    float momentum_, eps_;
    Tensor x_, save_mean_, save_invstd_;
};

class ReLU : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor y_;
};

class Sigmoid : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

private:
    Tensor y_;
};

class MaxPool2d : public Layer {
public:
    MaxPool2d(int k, int stride, int pad);
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

private:
    int k_, stride_, pad_;
    std::vector<int> in_shape_;
    std::vector<std::int32_t> argmax_;
};

/// [n,c,h,w] -> [n,c].
class GlobalAvgPool : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

private:
    std::vector<int> in_shape_;
};

class Linear : public Layer {
public:
    Linear(std::string name, int in, int out, bool bias = true);
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void init_params(Pcg32& rng) override;

    Param weight, bias;
    bool has_bias;

private:
    int in_, out_;
    Tensor x_;
};

/// Nearest-neighbour 2x upsampling.
class Upsample2x : public Layer {
public:
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

private:
    std::vector<int> in_shape_;
};

/// [n, c*h*w] -> [n, c, h, w].
class Reshape4d : public Layer {
public:
    Reshape4d(int c, int h, int w);
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;

private:
    int c_, h_, w_;
    std::vector<int> in_shape_;
};

class Sequential : public Layer {
public:
    Sequential() = default;
    void add(std::unique_ptr<Layer> layer) { layers_.push_back(std::move(layer)); }
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void collect_buffers(std::vector<BufferRef>& bs) override;
    void init_params(Pcg32& rng) override;
    std::size_t size() const { return layers_.size(); }

private:
    std::vector<std::unique_ptr<Layer>> layers_;
};

/// Two 3x3 conv+BN with identity (or 1x1 projection) skip, post-add ReLU.
class BasicBlock : public Layer {
public:
    BasicBlock(std::string name, int cin, int cout, int stride);
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void collect_buffers(std::vector<BufferRef>& bs) override;
    void init_params(Pcg32& rng) override;

private:
    Conv2d conv1_;
    BatchNorm2d bn1_;
    ReLU relu1_;
    Conv2d conv2_;
    BatchNorm2d bn2_;
    bool has_proj_;
    std::unique_ptr<Conv2d> proj_conv_;
    std::unique_ptr<BatchNorm2d> proj_bn_;
    Tensor x_, sum_y_;
};

/// Copies values (not grads) between identically-shaped parameter lists.
void copy_params(const std::vector<Param*>& src, const std::vector<Param*>& dst);
/// target = tau*target + (1-tau)*online, elementwise. tau=1 leaves the target
/// fixed, tau=0 copies the online values.
void ema_update(const std::vector<Param*>& target, const std::vector<Param*>& online, double tau);

}  // namespace rearing::learn
