#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rearing/core/tensor.hpp"
#include "rearing/dataset/manifest.hpp"
#include "rearing/learn/networks.hpp"
#include "rearing/probe/folds.hpp"

namespace rearing::probe {

struct LinearReadout {
    std::vector<float> w;
    float b = 0.0f;
};

struct ProbeParams {
    double l2 = 1e-4;
    int max_iters = 10000;
    double grad_tol = 1e-5;

    void validate() const;
};

// Extracted embeddings with the rearing metadata needed to form viewpoint folds.
// Row i of x belongs to object_id[i] seen from viewpoint_range[i].
struct FeatureSet {
    Tensor x;  // [n, d]
    std::vector<int> object_id;
    std::vector<int> viewpoint_range;

    int rows() const { return x.ndim() == 2 ? x.shape[0] : 0; }
    int dims() const { return x.ndim() == 2 ? x.shape[1] : 0; }
    void validate() const;
    bool covers_all_cells() const;
};

struct EvalReport {
    std::string method;
    std::string condition;
    std::string scheme;
    std::vector<double> per_fold_accuracy;
    double mean_accuracy = 0.0;
    double standard_error = 0.0;
    double chick_familiar = 0.79;
    double chick_novel = 0.69;
};

// Per-dimension affine map fitted on a fold's training rows only. Dimensions
// that are constant on the training split get scale 0 and drop out entirely,
// so a degenerate train split cannot amplify test-set noise.
struct Standardizer {
    std::vector<float> mean;
    std::vector<float> scale;
};

Standardizer fit_standardizer(const Tensor& x, const std::vector<int>& rows);
Tensor apply_standardizer(const Standardizer& s, const Tensor& x, const std::vector<int>& rows);

double readout_loss(const LinearReadout& r, const Tensor& x, const std::vector<int>& labels,
                    double l2);

LinearReadout fit_readout(const Tensor& x, const std::vector<int>& labels, double l2,
                          std::uint64_t seed, const ProbeParams& params = {});

double evaluate_readout(const LinearReadout& r, const Tensor& x, const std::vector<int>& labels);

EvalReport cross_validate(const FeatureSet& features, FoldScheme scheme, double l2,
                          std::uint64_t seed, const ProbeParams& params = {});

// Encoder-level wrapper: loads the eval images, extracts embeddings once, then
// runs the fold loop above. The encoder is frozen; its parameter checksum is
// verified unchanged across the extraction pass.
EvalReport cross_validate(learn::ResNetEncoder& encoder, const dataset::DatasetManifest& manifest,
                          const std::filesystem::path& dataset_dir, FoldScheme scheme, double l2,
                          std::uint64_t seed, const ProbeParams& params = {});

FeatureSet feature_set_from_manifest(const dataset::DatasetManifest& manifest, const Tensor& x);

// Externally computed embeddings, keyed by the manifest-relative image path.
struct KeyedFeatures {
    std::vector<std::string> keys;
    Tensor x;  // [n, d]
};

void save_features_jsonl(const std::filesystem::path& path, const KeyedFeatures& f);
KeyedFeatures load_features_jsonl(const std::filesystem::path& path);

// Joins imported rows against the manifest by image path. Unknown keys are
// rejected; records without a feature row are simply absent from the result.
FeatureSet feature_set_from_keyed(const dataset::DatasetManifest& manifest,
                                  const KeyedFeatures& f);

std::string report_to_json(const EvalReport& r);
EvalReport report_from_json(const std::string& text);
std::vector<std::string> report_csv_rows(const EvalReport& r);

}  // namespace rearing::probe
