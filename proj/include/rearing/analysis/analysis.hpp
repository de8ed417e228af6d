#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "rearing/core/tensor.hpp"
#include "rearing/dataset/manifest.hpp"
#include "rearing/learn/networks.hpp"
#include "rearing/probe/probe.hpp"

namespace rearing::analysis {

inline constexpr int kConditionCells = 24;

// Fixed cell order shared by RDM rows and columns: object 1 viewpoint ranges
// 1..12 first, then object 2.
inline int cell_index(int object_id, int viewpoint_range) {
    return (object_id - 1) * 12 + (viewpoint_range - 1);
}

struct ConditionMeanFeatures {
    Tensor means;  // [24, d] in cell order
    std::array<int, kConditionCells> counts{};

    void validate() const;
};

ConditionMeanFeatures condition_means(const probe::FeatureSet& features);
ConditionMeanFeatures condition_means(learn::ResNetEncoder& encoder,
                                      const dataset::DatasetManifest& manifest,
                                      const std::filesystem::path& dataset_dir);

struct Rdm {
    std::array<double, kConditionCells * kConditionCells> d{};

    double at(int i, int j) const { return d[static_cast<std::size_t>(i) * kConditionCells + j]; }
    double& at(int i, int j) { return d[static_cast<std::size_t>(i) * kConditionCells + j]; }
};

// Pairwise cosine distance 1 - cos(v_i, v_j) between condition means.
Rdm compute_rdm(const ConditionMeanFeatures& means);

struct LdaProjection {
    Tensor points;              // [n, 2], centered on the global mean
    Tensor class_means;         // [k, 2]
    std::vector<int> class_ids; // label value per class_means row, ascending
};

// Multiclass discriminant projection onto the top-2 eigenvectors of
// (S_w + eps I)^-1 S_b with eps = 1e-6 trace(S_w)/D. Axis sign fixed by
// making each axis's first non-negligible component positive.
LdaProjection lda_project(const Tensor& x, const std::vector<int>& labels);

// One image per 100 ms of visual experience.
double chick_image_budget(double hours);

}  // namespace rearing::analysis
