#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "rearing/augment/augment.hpp"
#include "rearing/dataset/manifest.hpp"
#include "rearing/learn/networks.hpp"

namespace rearing::learn {

enum class Method { Autoencoder, AutoencoderAug, SimCLR, BYOL };

Method method_from_string(const std::string& s);
const char* to_string(Method m);
/// All four methods in canonical order.
const std::vector<Method>& all_methods();

struct TrainConfig {
    Method method = Method::SimCLR;
    EncoderConfig encoder = EncoderConfig::desk();
    int epochs = 40;
    int batch_size = 64;
    int warmup_epochs = 10;
    double base_lr = 0.0;  // 0 selects the batch-scaled default
    double momentum = 0.9;
    double weight_decay = 0.0;
    double tau_nt = 0.5;   // NT-Xent temperature
    double tau_ema = 0.99; // target network decay
    int proj_dim = 128;
    std::uint64_t seed = 1;
    augment::AugmentParams augment;

    void validate() const;
    double effective_base_lr() const;
};

struct TrainResult {
    std::vector<double> epoch_loss;  // mean batch loss per epoch
    std::unique_ptr<ResNetEncoder> encoder;
    // Populated for the bootstrap method only; the target is updated by EMA
    // alone, which tests can verify (tau_ema = 1 keeps it fixed at init).
    std::unique_ptr<ResNetEncoder> target_encoder;
    std::unique_ptr<MlpHead> target_projector;
};

/// Trains an encoder with the configured method on in-memory frames, each a
/// [3,64,64] float tensor in [0,1]. Shuffling, augmentation and init draw from
/// streams derived from cfg.seed, so a fixed config gives a bit-identical loss
/// history and parameters in either execution mode. Throws NumericError if a
/// batch loss goes non-finite.
TrainResult train_encoder(const std::vector<Tensor>& images, const TrainConfig& cfg);

/// Eval-mode embeddings [M, embed_dim] in input order. No augmentation.
Tensor extract_features(ResNetEncoder& enc, const std::vector<Tensor>& images,
                        int batch_size = 64);

struct LoadedImages {
    std::vector<Tensor> images;  // record order
    std::vector<dataset::ManifestRecord> records;
};

/// Decodes every image of a built dataset. With require_single_condition set,
/// rejects manifests that mix rearing conditions (a reared network sees one
/// object in one viewpoint range).
LoadedImages load_images(const dataset::DatasetManifest& m, const std::string& dataset_dir,
                         bool require_single_condition);

}  // namespace rearing::learn
