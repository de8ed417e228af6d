#pragma once

#include <array>
#include <string>

#include "rearing/learn/layers.hpp"

namespace rearing::learn {

struct EncoderConfig {
    /// Channel widths of the four residual stages. The embedding dimension is
    /// the last stage width (global average pooling follows it).
    std::array<int, 4> widths{64, 128, 256, 512};

    int embed_dim() const { return widths[3]; }
    void validate() const;

    static EncoderConfig desk() { return {{16, 32, 64, 128}}; }
    static EncoderConfig paper() { return {{64, 128, 256, 512}}; }
    bool operator==(const EncoderConfig&) const = default;
};

/// 18-layer residual encoder: 7x7 stem, 4 stages of two basic blocks, global
/// average pool. Input [n,3,64,64], output [n,embed_dim].
class ResNetEncoder : public Layer {
public:
    explicit ResNetEncoder(const EncoderConfig& cfg, const std::string& prefix = "encoder");
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void collect_buffers(std::vector<BufferRef>& bs) override;
    void init_params(Pcg32& rng) override;

    const EncoderConfig& config() const { return cfg_; }

private:
    EncoderConfig cfg_;
    Sequential body_;
};

/// Mirror of the encoder for reconstruction: linear to a 2x2 map, five
/// upsample+conv stages back to 64x64, sigmoid output in [0,1].
class ConvDecoder : public Layer {
public:
    explicit ConvDecoder(const EncoderConfig& cfg, const std::string& prefix = "decoder");
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void collect_buffers(std::vector<BufferRef>& bs) override;
    void init_params(Pcg32& rng) override;

private:
    Sequential body_;
};

/// Two-layer MLP with a hidden batch norm: in -> hidden -> out.
class MlpHead : public Layer {
public:
    MlpHead(const std::string& prefix, int in, int hidden, int out);
    Tensor forward(const Tensor& x, bool training) override;
    Tensor backward(const Tensor& dy) override;
    void collect_params(std::vector<Param*>& ps) override;
    void collect_buffers(std::vector<BufferRef>& bs) override;
    void init_params(Pcg32& rng) override;

private:
    Sequential body_;
};

}  // namespace rearing::learn
