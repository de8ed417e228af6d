#include "rearing/learn/networks.hpp"

#include <stdexcept>

namespace rearing::learn {

void EncoderConfig::validate() const {
    for (int w : widths) {
        if (w < 1) throw std::invalid_argument("EncoderConfig: stage widths must be >= 1");
    }
}

ResNetEncoder::ResNetEncoder(const EncoderConfig& cfg, const std::string& prefix) : cfg_(cfg) {
    cfg_.validate();
    const auto& w = cfg_.widths;
    body_.add(std::make_unique<Conv2d>(prefix + ".conv1", 3, w[0], 7, 2, 3, false));
    body_.add(std::make_unique<BatchNorm2d>(prefix + ".bn1", w[0]));
    body_.add(std::make_unique<ReLU>());
    body_.add(std::make_unique<MaxPool2d>(3, 2, 1));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer1.0", w[0], w[0], 1));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer1.1", w[0], w[0], 1));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer2.0", w[0], w[1], 2));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer2.1", w[1], w[1], 1));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer3.0", w[1], w[2], 2));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer3.1", w[2], w[2], 1));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer4.0", w[2], w[3], 2));
    body_.add(std::make_unique<BasicBlock>(prefix + ".layer4.1", w[3], w[3], 1));
    body_.add(std::make_unique<GlobalAvgPool>());
}

Tensor ResNetEncoder::forward(const Tensor& x, bool training) { return body_.forward(x, training); }
Tensor ResNetEncoder::backward(const Tensor& dy) { return body_.backward(dy); }
void ResNetEncoder::collect_params(std::vector<Param*>& ps) { body_.collect_params(ps); }
void ResNetEncoder::collect_buffers(std::vector<BufferRef>& bs) { body_.collect_buffers(bs); }
void ResNetEncoder::init_params(Pcg32& rng) { body_.init_params(rng); }

ConvDecoder::ConvDecoder(const EncoderConfig& cfg, const std::string& prefix) {
    cfg.validate();
    const auto& w = cfg.widths;
    const int d = cfg.embed_dim();
    body_.add(std::make_unique<Linear>(prefix + ".fc", d, w[3] * 2 * 2, true));
    body_.add(std::make_unique<Reshape4d>(w[3], 2, 2));
    const int chans[6] = {w[3], w[2], w[1], w[0], w[0], w[0]};
    for (int s = 0; s < 5; ++s) {
        body_.add(std::make_unique<Upsample2x>());
        body_.add(std::make_unique<Conv2d>(prefix + ".conv" + std::to_string(s + 1), chans[s],
                                           chans[s + 1], 3, 1, 1, false));
        body_.add(std::make_unique<BatchNorm2d>(prefix + ".bn" + std::to_string(s + 1), chans[s + 1]));
        body_.add(std::make_unique<ReLU>());
    }
    body_.add(std::make_unique<Conv2d>(prefix + ".out", w[0], 3, 3, 1, 1, true));
    body_.add(std::make_unique<Sigmoid>());
}

Tensor ConvDecoder::forward(const Tensor& x, bool training) { return body_.forward(x, training); }
Tensor ConvDecoder::backward(const Tensor& dy) { return body_.backward(dy); }
void ConvDecoder::collect_params(std::vector<Param*>& ps) { body_.collect_params(ps); }
void ConvDecoder::collect_buffers(std::vector<BufferRef>& bs) { body_.collect_buffers(bs); }
void ConvDecoder::init_params(Pcg32& rng) { body_.init_params(rng); }

MlpHead::MlpHead(const std::string& prefix, int in, int hidden, int out) {
    body_.add(std::make_unique<Linear>(prefix + ".fc1", in, hidden, false));
    body_.add(std::make_unique<BatchNorm2d>(prefix + ".bn", hidden));
    body_.add(std::make_unique<ReLU>());
    body_.add(std::make_unique<Linear>(prefix + ".fc2", hidden, out, true));
}

Tensor MlpHead::forward(const Tensor& x, bool training) { return body_.forward(x, training); }
Tensor MlpHead::backward(const Tensor& dy) { return body_.backward(dy); }
void MlpHead::collect_params(std::vector<Param*>& ps) { body_.collect_params(ps); }
void MlpHead::collect_buffers(std::vector<BufferRef>& bs) { body_.collect_buffers(bs); }
void MlpHead::init_params(Pcg32& rng) { body_.init_params(rng); }

}  // namespace rearing::learn
