#include "rearing/learn/layers.hpp"

#include <cmath>
#include <stdexcept>

#include "rearing/core/parallel.hpp"

namespace rearing::learn {

namespace k = rearing::kernels;

namespace {

void require_4d(const Tensor& x, const char* what) {
    if (x.ndim() != 4) {
        throw std::invalid_argument(std::string(what) + ": expected 4-d input, got " + x.shape_str());
    }
}

void he_normal(Tensor& w, int fan_in, Pcg32& rng) {
    const double std = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (auto& v : w.v) v = static_cast<float>(rng.normal() * std);
}

}  // namespace

// ---- Conv2d ----

Conv2d::Conv2d(std::string name, int cin, int cout, int kk, int stride, int pad, bool bias)
    : has_bias(bias), cin_(cin), cout_(cout), k_(kk), stride_(stride), pad_(pad) {
    weight.name = name + ".weight";
    weight.w = Tensor({cout, cin, kk, kk});
    weight.g = Tensor({cout, cin, kk, kk});
    if (has_bias) {
        this->bias.name = name + ".bias";
        this->bias.w = Tensor({cout});
        this->bias.g = Tensor({cout});
    }
}

Tensor Conv2d::forward(const Tensor& x, bool) {
    require_4d(x, "Conv2d");
    if (x.dim(1) != cin_) {
        throw std::invalid_argument("Conv2d: channel mismatch, got " + x.shape_str());
    }
    x_ = x;
    k::ConvDims d{x.dim(0), cin_, x.dim(2), x.dim(3), cout_, k_, k_, stride_, pad_};
    Tensor y({d.n, cout_, d.ho(), d.wo()});
    k::conv2d_forward(x.data(), weight.w.data(), has_bias ? bias.w.data() : nullptr, y.data(), d);
    return y;
}

Tensor Conv2d::backward(const Tensor& dy) {
    k::ConvDims d{x_.dim(0), cin_, x_.dim(2), x_.dim(3), cout_, k_, k_, stride_, pad_};
    k::conv2d_backward_params(dy.data(), x_.data(), weight.g.data(),
                              has_bias ? bias.g.data() : nullptr, d);
    Tensor dx(x_.shape);
    k::conv2d_backward_input(dy.data(), weight.w.data(), dx.data(), d);
    return dx;
}

void Conv2d::collect_params(std::vector<Param*>& ps) {
    ps.push_back(&weight);
    if (has_bias) ps.push_back(&bias);
}

void Conv2d::init_params(Pcg32& rng) {
    he_normal(weight.w, cin_ * k_ * k_, rng);
    if (has_bias) bias.w.zero();
}

// ---- BatchNorm2d ----

BatchNorm2d::BatchNorm2d(std::string name, int c, double momentum, double eps)
    : c_(c), momentum_(static_cast<float>(momentum)), eps_(static_cast<float>(eps)) {
    gamma.name = name + ".gamma";
    gamma.w = Tensor({c});
    gamma.g = Tensor({c});
    beta.name = name + ".beta";
    beta.w = Tensor({c});
    beta.g = Tensor({c});
    gamma.w.fill(1.0f);
    running_mean = Tensor({c});
    running_var = Tensor({c});
    running_var.fill(1.0f);
    save_mean_ = Tensor({c});
    save_invstd_ = Tensor({c});
}

Tensor BatchNorm2d::forward(const Tensor& x, bool training) {
    if (!(x.ndim() == 4 || x.ndim() == 2) || x.dim(1) != c_) {
        throw std::invalid_argument("BatchNorm2d: bad input " + x.shape_str());
    }
    const int n = x.dim(0);
    const int hw = x.ndim() == 4 ? x.dim(2) * x.dim(3) : 1;
    x_ = x;
    Tensor y(x.shape);
    k::bn_forward(y.data(), x.data(), n, c_, hw, gamma.w.data(), beta.w.data(),
                  running_mean.data(), running_var.data(), momentum_, eps_, training,
                  save_mean_.data(), save_invstd_.data());
    return y;
}

Tensor BatchNorm2d::backward(const Tensor& dy) {
    const int n = x_.dim(0);
    const int hw = x_.ndim() == 4 ? x_.dim(2) * x_.dim(3) : 1;
    Tensor dx(x_.shape);
    k::bn_backward(dx.data(), gamma.g.data(), beta.g.data(), dy.data(), x_.data(), n, c_, hw,
                   gamma.w.data(), save_mean_.data(), save_invstd_.data());
    return dx;
}

void BatchNorm2d::collect_params(std::vector<Param*>& ps) {
    ps.push_back(&gamma);
    ps.push_back(&beta);
}

void BatchNorm2d::collect_buffers(std::vector<BufferRef>& bs) {
    std::string base = gamma.name.substr(0, gamma.name.size() - 6);  // strip ".gamma"
    bs.emplace_back(base + ".running_mean", &running_mean);
    bs.emplace_back(base + ".running_var", &running_var);
}

void BatchNorm2d::init_params(Pcg32&) {
    gamma.w.fill(1.0f);
    beta.w.zero();
    running_mean.zero();
    running_var.fill(1.0f);
}

// ---- ReLU / Sigmoid ----

Tensor ReLU::forward(const Tensor& x, bool) {
    y_ = Tensor(x.shape);
    k::relu_forward(y_.data(), x.data(), x.numel());
    return y_;
}

Tensor ReLU::backward(const Tensor& dy) {
    Tensor dx(y_.shape);
    k::relu_backward(dx.data(), dy.data(), y_.data(), y_.numel());
    return dx;
}

Tensor Sigmoid::forward(const Tensor& x, bool) {
    y_ = Tensor(x.shape);
    k::sigmoid_forward(y_.data(), x.data(), x.numel());
    return y_;
}

Tensor Sigmoid::backward(const Tensor& dy) {
    Tensor dx(y_.shape);
    k::sigmoid_backward(dx.data(), dy.data(), y_.data(), y_.numel());
    return dx;
}

// ---- MaxPool2d ----

MaxPool2d::MaxPool2d(int kk, int stride, int pad) : k_(kk), stride_(stride), pad_(pad) {}

Tensor MaxPool2d::forward(const Tensor& x, bool) {
    require_4d(x, "MaxPool2d");
    in_shape_ = x.shape;
    const int n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const int ho = (h + 2 * pad_ - k_) / stride_ + 1;
    const int wo = (w + 2 * pad_ - k_) / stride_ + 1;
    Tensor y({n, c, ho, wo});
    argmax_.assign(y.v.size(), -1);
    k::maxpool_forward(y.data(), argmax_.data(), x.data(), n, c, h, w, k_, stride_, pad_);
    return y;
}

Tensor MaxPool2d::backward(const Tensor& dy) {
    Tensor dx(in_shape_);
    k::maxpool_backward(dx.data(), dy.data(), argmax_.data(), in_shape_[0], in_shape_[1],
                        in_shape_[2], in_shape_[3], k_, stride_, pad_);
    return dx;
}

// ---- GlobalAvgPool ----

Tensor GlobalAvgPool::forward(const Tensor& x, bool) {
    require_4d(x, "GlobalAvgPool");
    in_shape_ = x.shape;
    Tensor y({x.dim(0), x.dim(1)});
    k::global_avg_pool_forward(y.data(), x.data(), x.dim(0), x.dim(1), x.dim(2) * x.dim(3));
    return y;
}

Tensor GlobalAvgPool::backward(const Tensor& dy) {
    Tensor dx(in_shape_);
    k::global_avg_pool_backward(dx.data(), dy.data(), in_shape_[0], in_shape_[1],
                                in_shape_[2] * in_shape_[3]);
    return dx;
}

// ---- Linear ----

Linear::Linear(std::string name, int in, int out, bool bias)
    : has_bias(bias), in_(in), out_(out) {
    weight.name = name + ".weight";
    weight.w = Tensor({out, in});
    weight.g = Tensor({out, in});
    if (has_bias) {
        this->bias.name = name + ".bias";
        this->bias.w = Tensor({out});
        this->bias.g = Tensor({out});
    }
}

Tensor Linear::forward(const Tensor& x, bool) {
    if (x.ndim() != 2 || x.dim(1) != in_) {
        throw std::invalid_argument("Linear: expected [n," + std::to_string(in_) + "], got " +
                                    x.shape_str());
    }
    x_ = x;
    Tensor y({x.dim(0), out_});
    k::linear_forward(y.data(), x.data(), weight.w.data(), has_bias ? bias.w.data() : nullptr,
                      x.dim(0), in_, out_);
    return y;
}

Tensor Linear::backward(const Tensor& dy) {
    Tensor dx(x_.shape);
    k::linear_backward(dx.data(), weight.g.data(), has_bias ? bias.g.data() : nullptr, dy.data(),
                       x_.data(), weight.w.data(), x_.dim(0), in_, out_);
    return dx;
}

void Linear::collect_params(std::vector<Param*>& ps) {
    ps.push_back(&weight);
    if (has_bias) ps.push_back(&bias);
}

void Linear::init_params(Pcg32& rng) {
    he_normal(weight.w, in_, rng);
    if (has_bias) bias.w.zero();
}

// ---- Upsample2x ----

Tensor Upsample2x::forward(const Tensor& x, bool) {
    require_4d(x, "Upsample2x");
    in_shape_ = x.shape;
    Tensor y({x.dim(0), x.dim(1), 2 * x.dim(2), 2 * x.dim(3)});
    k::upsample2x_forward(y.data(), x.data(), x.dim(0), x.dim(1), x.dim(2), x.dim(3));
    return y;
}

Tensor Upsample2x::backward(const Tensor& dy) {
    Tensor dx(in_shape_);
    k::upsample2x_backward(dx.data(), dy.data(), in_shape_[0], in_shape_[1], in_shape_[2],
                           in_shape_[3]);
    return dx;
}

// ---- Reshape4d ----

Reshape4d::Reshape4d(int c, int h, int w) : c_(c), h_(h), w_(w) {}

Tensor Reshape4d::forward(const Tensor& x, bool) {
    if (x.ndim() != 2 || x.dim(1) != c_ * h_ * w_) {
        throw std::invalid_argument("Reshape4d: bad input " + x.shape_str());
    }
    in_shape_ = x.shape;
    Tensor y = x;
    y.shape = {x.dim(0), c_, h_, w_};
    return y;
}

Tensor Reshape4d::backward(const Tensor& dy) {
    Tensor dx = dy;
    dx.shape = in_shape_;
    return dx;
}

// ---- Sequential ----

Tensor Sequential::forward(const Tensor& x, bool training) {
    Tensor h = x;
    for (auto& l : layers_) h = l->forward(h, training);
    return h;
}

Tensor Sequential::backward(const Tensor& dy) {
    Tensor g = dy;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
    return g;
}

void Sequential::collect_params(std::vector<Param*>& ps) {
    for (auto& l : layers_) l->collect_params(ps);
}

void Sequential::collect_buffers(std::vector<BufferRef>& bs) {
    for (auto& l : layers_) l->collect_buffers(bs);
}

void Sequential::init_params(Pcg32& rng) {
    for (auto& l : layers_) l->init_params(rng);
}

// ---- BasicBlock ----

BasicBlock::BasicBlock(std::string name, int cin, int cout, int stride)
    : conv1_(name + ".conv1", cin, cout, 3, stride, 1, false),
      bn1_(name + ".bn1", cout),
      conv2_(name + ".conv2", cout, cout, 3, 1, 1, false),
      bn2_(name + ".bn2", cout),
      has_proj_(stride != 1 || cin != cout) {
    if (has_proj_) {
        proj_conv_ = std::make_unique<Conv2d>(name + ".proj", cin, cout, 1, stride, 0, false);
        proj_bn_ = std::make_unique<BatchNorm2d>(name + ".proj_bn", cout);
    }
}

Tensor BasicBlock::forward(const Tensor& x, bool training) {
    x_ = x;
    Tensor h = relu1_.forward(bn1_.forward(conv1_.forward(x, training), training), training);
    Tensor h2 = bn2_.forward(conv2_.forward(h, training), training);
    Tensor skip = has_proj_ ? proj_bn_->forward(proj_conv_->forward(x, training), training) : x;
    require_same_shape(h2, skip, "BasicBlock");
    k::add_inplace(h2.data(), skip.data(), h2.numel());
    sum_y_ = Tensor(h2.shape);
    k::relu_forward(sum_y_.data(), h2.data(), h2.numel());
    return sum_y_;
}

Tensor BasicBlock::backward(const Tensor& dy) {
    Tensor dsum(sum_y_.shape);
    k::relu_backward(dsum.data(), dy.data(), sum_y_.data(), sum_y_.numel());
    Tensor d_h = bn2_.backward(dsum);
    d_h = conv2_.backward(d_h);
    d_h = relu1_.backward(d_h);
    d_h = bn1_.backward(d_h);
    Tensor dx_main = conv1_.backward(d_h);
    Tensor dx_skip = has_proj_ ? proj_conv_->backward(proj_bn_->backward(dsum)) : dsum;
    k::add_inplace(dx_main.data(), dx_skip.data(), dx_main.numel());
    return dx_main;
}

void BasicBlock::collect_params(std::vector<Param*>& ps) {
    conv1_.collect_params(ps);
    bn1_.collect_params(ps);
    conv2_.collect_params(ps);
    bn2_.collect_params(ps);
    if (has_proj_) {
        proj_conv_->collect_params(ps);
        proj_bn_->collect_params(ps);
    }
}

void BasicBlock::collect_buffers(std::vector<BufferRef>& bs) {
    bn1_.collect_buffers(bs);
    bn2_.collect_buffers(bs);
    if (has_proj_) proj_bn_->collect_buffers(bs);
}

void BasicBlock::init_params(Pcg32& rng) {
    conv1_.init_params(rng);
    bn1_.init_params(rng);
    conv2_.init_params(rng);
    bn2_.init_params(rng);
    if (has_proj_) {
        proj_conv_->init_params(rng);
        proj_bn_->init_params(rng);
    }
}

// ---- parameter utilities ----

void copy_params(const std::vector<Param*>& src, const std::vector<Param*>& dst) {
    if (src.size() != dst.size()) throw std::invalid_argument("copy_params: size mismatch");
    for (std::size_t i = 0; i < src.size(); ++i) {
        require_same_shape(src[i]->w, dst[i]->w, "copy_params");
        dst[i]->w.v = src[i]->w.v;
    }
}

void ema_update(const std::vector<Param*>& target, const std::vector<Param*>& online, double tau) {
    if (online.size() != target.size()) throw std::invalid_argument("ema_update: size mismatch");
    if (tau < 0.0 || tau > 1.0) throw std::invalid_argument("ema_update: tau must be in [0,1]");
    const float t = static_cast<float>(tau);
    const float o = static_cast<float>(1.0 - tau);
    for (std::size_t i = 0; i < online.size(); ++i) {
        require_same_shape(online[i]->w, target[i]->w, "ema_update");
        float* tw = target[i]->w.data();
        const float* ow = online[i]->w.data();
        const std::int64_t n = target[i]->w.numel();
        for (std::int64_t j = 0; j < n; ++j) tw[j] = t * tw[j] + o * ow[j];
    }
}

}  // namespace rearing::learn
