#include "rearing/learn/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "rearing/core/errors.hpp"
#include "rearing/core/parallel.hpp"
#include "rearing/dataset/png_io.hpp"
#include "rearing/learn/losses.hpp"
#include "rearing/learn/optim.hpp"
#include "rearing/learn/schedule.hpp"

namespace rearing::learn {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kInitKey = 0x696e6974;      // weight init stream
constexpr std::uint64_t kShuffleKey = 0x73687566;   // per-epoch shuffle stream

void require_frame(const Tensor& t, std::size_t i) {
    if (t.ndim() != 3 || t.dim(0) != 3 || t.dim(1) != chamber::kFrameSize ||
        t.dim(2) != chamber::kFrameSize) {
        throw std::invalid_argument("train: image " + std::to_string(i) + " has shape " +
                                    t.shape_str() + ", expected [3,64,64]");
    }
}

/// Copies image rows into a [rows,3,H,W] batch; row_of maps output row to a
/// source image, aug decides whether that row is an augmented view.
Tensor stack_rows(const std::vector<Tensor>& images, const std::vector<int>& idx, int n_views,
                  bool aug, int epoch, const TrainConfig& cfg) {
    const int b = static_cast<int>(idx.size());
    const int rows = n_views * b;
    const int hw = chamber::kFrameSize;
    Tensor out({rows, 3, hw, hw});
    const std::int64_t stride = static_cast<std::int64_t>(3) * hw * hw;
    par::for_n(rows, [&](std::int64_t r) {
        const int view = static_cast<int>(r) / b;
        const int j = static_cast<int>(r) % b;
        const Tensor& src = images[static_cast<std::size_t>(idx[static_cast<std::size_t>(j)])];
        if (aug) {
            Pcg32 rng = augment::view_rng(cfg.seed, epoch, idx[static_cast<std::size_t>(j)], view);
            Tensor v = augment::augment_view(src, rng, cfg.augment);
            std::copy(v.v.begin(), v.v.end(), out.v.begin() + r * stride);
        } else {
            std::copy(src.v.begin(), src.v.end(), out.v.begin() + r * stride);
        }
    });
    return out;
}

std::vector<int> epoch_permutation(int m, std::uint64_t seed, int epoch) {
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) perm[static_cast<std::size_t>(i)] = i;
    Pcg32 rng(seed, derive_stream(seed, {kShuffleKey, static_cast<std::uint64_t>(epoch)}));
    for (int i = m - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.uniform_int(static_cast<std::uint32_t>(i + 1)));
        std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
    }
    return perm;
}

}  // namespace

Method method_from_string(const std::string& s) {
    if (s == "autoencoder") return Method::Autoencoder;
    if (s == "autoencoder_aug") return Method::AutoencoderAug;
    if (s == "simclr") return Method::SimCLR;
    if (s == "byol") return Method::BYOL;
    throw std::invalid_argument("unknown method '" + s +
                                "' (expected autoencoder, autoencoder_aug, simclr, byol)");
}

const char* to_string(Method m) {
    switch (m) {
        case Method::Autoencoder: return "autoencoder";
        case Method::AutoencoderAug: return "autoencoder_aug";
        case Method::SimCLR: return "simclr";
        case Method::BYOL: return "byol";
    }
    return "?";
}

const std::vector<Method>& all_methods() {
    static const std::vector<Method> ms{Method::Autoencoder, Method::AutoencoderAug,
                                        Method::SimCLR, Method::BYOL};
    return ms;
}

void TrainConfig::validate() const {
    encoder.validate();
    augment.validate();
    if (epochs < 1) throw std::invalid_argument("TrainConfig: epochs must be >= 1");
    if (batch_size < 4) throw std::invalid_argument("TrainConfig: batch_size must be >= 4");
    if (warmup_epochs < 0 || warmup_epochs >= epochs) {
        throw std::invalid_argument("TrainConfig: need 0 <= warmup_epochs < epochs");
    }
    if (base_lr < 0.0) throw std::invalid_argument("TrainConfig: base_lr must be >= 0");
    if (momentum < 0.0 || momentum >= 1.0) {
        throw std::invalid_argument("TrainConfig: momentum must be in [0,1)");
    }
    if (weight_decay < 0.0) throw std::invalid_argument("TrainConfig: weight_decay must be >= 0");
    if (!(tau_nt > 0.0)) throw std::invalid_argument("TrainConfig: tau_nt must be positive");
    if (tau_ema < 0.0 || tau_ema > 1.0) {
        throw std::invalid_argument("TrainConfig: tau_ema must be in [0,1]");
    }
    if (proj_dim < 1) throw std::invalid_argument("TrainConfig: proj_dim must be >= 1");
}

double TrainConfig::effective_base_lr() const {
    return base_lr > 0.0 ? base_lr : auto_base_lr(batch_size);
}

TrainResult train_encoder(const std::vector<Tensor>& images, const TrainConfig& cfg) {
    cfg.validate();
    const int m = static_cast<int>(images.size());
    if (m < cfg.batch_size) {
        throw DataError("train: dataset of " + std::to_string(m) +
                        " frames is smaller than one batch of " + std::to_string(cfg.batch_size));
    }
    for (std::size_t i = 0; i < images.size(); ++i) require_frame(images[i], i);

    const int d = cfg.encoder.embed_dim();
    auto encoder = std::make_unique<ResNetEncoder>(cfg.encoder);
    std::unique_ptr<ConvDecoder> decoder;
    std::unique_ptr<MlpHead> projector, predictor;
    std::unique_ptr<ResNetEncoder> target_encoder;
    std::unique_ptr<MlpHead> target_projector;

    const bool is_ae = cfg.method == Method::Autoencoder || cfg.method == Method::AutoencoderAug;
    if (is_ae) {
        decoder = std::make_unique<ConvDecoder>(cfg.encoder);
    } else {
        projector = std::make_unique<MlpHead>("projector", d, d, cfg.proj_dim);
        if (cfg.method == Method::BYOL) {
            predictor = std::make_unique<MlpHead>("predictor", cfg.proj_dim, d, cfg.proj_dim);
            target_encoder = std::make_unique<ResNetEncoder>(cfg.encoder, "target_encoder");
            target_projector = std::make_unique<MlpHead>("target_projector", d, d, cfg.proj_dim);
        }
    }

    std::vector<Param*> online_params;
    encoder->collect_params(online_params);
    if (decoder) decoder->collect_params(online_params);
    if (projector) projector->collect_params(online_params);
    if (predictor) predictor->collect_params(online_params);

    Pcg32 init_rng(cfg.seed, derive_stream(cfg.seed, {kInitKey}));
    encoder->init_params(init_rng);
    if (decoder) decoder->init_params(init_rng);
    if (projector) projector->init_params(init_rng);
    if (predictor) predictor->init_params(init_rng);

    // BYOL: EMA tracks the online encoder and projector, never the predictor.
    std::vector<Param*> ema_src, ema_dst;
    if (cfg.method == Method::BYOL) {
        encoder->collect_params(ema_src);
        projector->collect_params(ema_src);
        target_encoder->collect_params(ema_dst);
        target_projector->collect_params(ema_dst);
        copy_params(ema_src, ema_dst);
    }

    SgdMomentum opt(online_params, cfg.momentum, cfg.weight_decay);
    const int steps_per_epoch = m / cfg.batch_size;  // drop-last batching
    if (steps_per_epoch < 1) {
        throw DataError("train: no full batch available");
    }
    LrSchedule sched{cfg.effective_base_lr(), cfg.warmup_epochs * steps_per_epoch,
                     cfg.epochs * steps_per_epoch};
    sched.validate();

    TrainResult result;
    result.epoch_loss.reserve(static_cast<std::size_t>(cfg.epochs));

    int global_step = 0;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        std::vector<int> perm = epoch_permutation(m, cfg.seed, epoch);
        double loss_acc = 0.0;
        for (int b = 0; b < steps_per_epoch; ++b) {
            std::vector<int> idx(perm.begin() + static_cast<std::ptrdiff_t>(b) * cfg.batch_size,
                                 perm.begin() + static_cast<std::ptrdiff_t>(b + 1) * cfg.batch_size);
            opt.zero_grad();
            double batch_loss = 0.0;
            switch (cfg.method) {
                case Method::Autoencoder:
                case Method::AutoencoderAug: {
                    const bool aug = cfg.method == Method::AutoencoderAug;
                    Tensor x = stack_rows(images, idx, 1, aug, epoch, cfg);
                    Tensor h = encoder->forward(x, true);
                    Tensor xhat = decoder->forward(h, true);
                    LossGrad lg = mse_loss(xhat, x);
                    batch_loss = lg.loss;
                    encoder->backward(decoder->backward(lg.grad));
                    break;
                }
                case Method::SimCLR: {
                    Tensor x = stack_rows(images, idx, 2, true, epoch, cfg);
                    Tensor h = encoder->forward(x, true);
                    Tensor z = projector->forward(h, true);
                    LossGrad lg = nt_xent_loss(z, cfg.tau_nt);
                    batch_loss = lg.loss;
                    encoder->backward(projector->backward(lg.grad));
                    break;
                }
                case Method::BYOL: {
                    Tensor x = stack_rows(images, idx, 2, true, epoch, cfg);
                    Tensor h = encoder->forward(x, true);
                    Tensor z = projector->forward(h, true);
                    Tensor p = predictor->forward(z, true);
                    // Target uses batch statistics; no gradients flow into it.
                    Tensor zt = target_projector->forward(target_encoder->forward(x, true), true);
                    const int rows = zt.dim(0), kdim = zt.dim(1);
                    Tensor zt_aligned({rows, kdim});
                    const int half = rows / 2;
                    for (int r = 0; r < rows; ++r) {
                        const int src = (r + half) % rows;
                        std::copy(zt.v.begin() + static_cast<std::ptrdiff_t>(src) * kdim,
                                  zt.v.begin() + static_cast<std::ptrdiff_t>(src + 1) * kdim,
                                  zt_aligned.v.begin() + static_cast<std::ptrdiff_t>(r) * kdim);
                    }
                    LossGrad lg = byol_loss(p, zt_aligned);
                    batch_loss = lg.loss;
                    encoder->backward(projector->backward(predictor->backward(lg.grad)));
                    break;
                }
            }
            if (!std::isfinite(batch_loss)) {
                throw NumericError(std::string("train: non-finite loss for ") +
                                   to_string(cfg.method) + " at epoch " + std::to_string(epoch) +
                                   " step " + std::to_string(b));
            }
            opt.step(sched.at(global_step));
            if (cfg.method == Method::BYOL) ema_update(ema_dst, ema_src, cfg.tau_ema);
            loss_acc += batch_loss;
            ++global_step;
        }
        result.epoch_loss.push_back(loss_acc / steps_per_epoch);
    }

    result.encoder = std::move(encoder);
    result.target_encoder = std::move(target_encoder);
    result.target_projector = std::move(target_projector);
    return result;
}

Tensor extract_features(ResNetEncoder& enc, const std::vector<Tensor>& images, int batch_size) {
    if (batch_size < 1) throw std::invalid_argument("extract_features: batch_size must be >= 1");
    const int m = static_cast<int>(images.size());
    const int d = enc.config().embed_dim();
    Tensor out({m, d});
    const int hw = chamber::kFrameSize;
    for (int start = 0; start < m; start += batch_size) {
        const int b = std::min(batch_size, m - start);
        Tensor x({b, 3, hw, hw});
        const std::int64_t stride = static_cast<std::int64_t>(3) * hw * hw;
        for (int j = 0; j < b; ++j) {
            require_frame(images[static_cast<std::size_t>(start + j)],
                          static_cast<std::size_t>(start + j));
            std::copy(images[static_cast<std::size_t>(start + j)].v.begin(),
                      images[static_cast<std::size_t>(start + j)].v.end(),
                      x.v.begin() + static_cast<std::ptrdiff_t>(j) * stride);
        }
        Tensor h = enc.forward(x, false);
        std::copy(h.v.begin(), h.v.end(),
                  out.v.begin() + static_cast<std::ptrdiff_t>(start) * d);
    }
    return out;
}

LoadedImages load_images(const dataset::DatasetManifest& m, const std::string& dataset_dir,
                         bool require_single_condition) {
    if (require_single_condition) {
        std::set<std::pair<int, int>> cells;
        for (const auto& r : m.records) cells.insert({r.object_id, r.viewpoint_range});
        if (cells.size() != 1) {
            throw DataError("train: dataset mixes " + std::to_string(cells.size()) +
                            " rearing conditions; a reared network sees exactly one");
        }
    }
    LoadedImages out;
    out.records = m.records;
    out.images.resize(m.records.size());
    std::vector<std::string> errors(m.records.size());
    par::for_n(static_cast<std::int64_t>(m.records.size()), [&](std::int64_t i) {
        try {
            const fs::path p = fs::path(dataset_dir) / m.records[static_cast<std::size_t>(i)].image_path;
            out.images[static_cast<std::size_t>(i)] =
                augment::image_to_tensor(dataset::read_frame_png(p.string()));
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    });
    for (const std::string& e : errors) {
        if (!e.empty()) throw DataError(e);
    }
    return out;
}

}  // namespace rearing::learn
