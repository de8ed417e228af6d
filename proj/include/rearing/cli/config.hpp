#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rearing/augment/augment.hpp"
#include "rearing/dataset/builder.hpp"
#include "rearing/learn/train.hpp"
#include "rearing/probe/folds.hpp"

namespace rearing::cli {

struct DatasetBlock {
    int per_condition = 500;  // training images per rearing condition
    int per_cell = 100;       // evaluation images per (object, viewpoint) cell
    int min_pixels = 1;
    int train_episodes = 10;
    int eval_episodes = 4;
    // the two viewpoint ranges crossed with both objects to form the four
    // rearing conditions
    std::array<int, 2> train_ranges{1, 7};

    void validate() const;
};

struct TrainBlock {
    std::vector<learn::Method> methods = learn::all_methods();
    learn::TrainConfig config;  // method and seed are assigned per run
};

struct ProbeBlock {
    std::vector<probe::FoldScheme> schemes = probe::all_schemes();
    double l2 = 1e-4;
    // optional externally computed embeddings (supervised reference); empty
    // means none
    std::string imported_features;
};

struct AnalysisBlock {
    bool rdm = true;
    bool lda = true;
};

struct SeedsBlock {
    std::uint64_t global = 1;
    // zero means derive from the global seed at load time; the resolved
    // config snapshot always shows the explicit values
    std::uint64_t dataset = 0;
    std::uint64_t train = 0;
    std::uint64_t probe = 0;

    void resolve();
};

struct PipelineConfig {
    dataset::BuilderParams builder;
    DatasetBlock dataset;
    augment::AugmentParams augment;
    TrainBlock train;
    ProbeBlock probe;
    AnalysisBlock analysis;
    SeedsBlock seeds;
    std::string output_root = "out";
    bool desk_scale = true;

    void validate() const;
    std::vector<dataset::RearingCondition> rearing_conditions() const;
    std::uint64_t model_seed(learn::Method m, const dataset::RearingCondition& c) const;
    learn::TrainConfig train_config(learn::Method m, const dataset::RearingCondition& c) const;
};

PipelineConfig desk_preset();
PipelineConfig paper_preset();

nlohmann::json to_json(const PipelineConfig& cfg);
PipelineConfig from_json(const nlohmann::json& j);

/// Leaf-level overlay of patch onto base.
void merge_json(nlohmann::json& base, const nlohmann::json& patch);

/// One REARING_<BLOCK>_<KEY> variable applied to the config json. Values
/// parse as JSON when possible, otherwise as plain strings.
void apply_env_var(nlohmann::json& cfg, const std::string& name, const std::string& value);

/// All REARING_* variables from the process environment.
std::vector<std::pair<std::string, std::string>> rearing_env_vars();

/// "train.epochs=80" or "output_root=out2" style command-line override.
void apply_override(nlohmann::json& cfg, const std::string& assignment);

struct LoadOptions {
    std::string preset = "desk";  // "desk" or "paper"
    std::string config_file;      // optional JSON file overlaid on the preset
    std::vector<std::string> overrides;
    bool use_env = true;
};

/// Preset, then file, then environment, then explicit overrides; seeds are
/// resolved and the result validated.
PipelineConfig load_config(const LoadOptions& opts);

std::string json_digest(const nlohmann::json& j);
std::string dataset_digest(const PipelineConfig& cfg);
std::string model_digest(const PipelineConfig& cfg, learn::Method m,
                         const dataset::RearingCondition& c);
std::string probe_digest(const PipelineConfig& cfg, const std::string& model_id);

std::string condition_name(const dataset::RearingCondition& c);  // "obj1_vp01"
std::string model_name(learn::Method m, const dataset::RearingCondition& c);

}  // namespace rearing::cli
