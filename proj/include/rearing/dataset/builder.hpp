#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rearing/chamber/chamber.hpp"
#include "rearing/chamber/types.hpp"
#include "rearing/dataset/manifest.hpp"

namespace rearing::dataset {

struct BuilderParams {
    chamber::ChamberSpec chamber;
    chamber::SceneParams scene;
    chamber::KinematicsParams kinematics;
    double anim_period_s = 6.0;
    double anim_sweep_deg = 60.0;
    double capture_hz = 10.0;
    double camera_height = 0.25;
    double fov_deg = 90.0;
    double object_radius = 0.12;
    int min_pixels = 1;        // visibility threshold for keeping a frame
    int train_episodes = 10;   // episodes per rearing condition
    int eval_episodes = 4;     // episodes per (object, range) cell
    int max_raw_factor = 100;  // abort an episode after this many renders per kept frame

    void validate() const;
};

struct EpisodeStats {
    int64_t raw_frames = 0;
    int64_t kept_frames = 0;
};

/// Runs one wandering episode under the given condition and returns n_frames
/// frames in which the object passes the visibility filter. The agent starts
/// at the chamber center with a seed-derived heading and follows the random
/// movement policy at the capture rate; the animation clock starts at zero.
/// Throws DataError, naming the condition, if the retention cap is exceeded.
std::vector<chamber::RenderedFrame> collect_episode(const RearingCondition& cond, int n_frames,
                                                    uint64_t seed, const BuilderParams& params,
                                                    EpisodeStats* stats = nullptr);

bool object_visible(const chamber::RenderedFrame& frame, int min_pixels);

/// Keeps frames whose object mask has at least min_pixels set. Order preserved.
std::vector<chamber::RenderedFrame> filter_object_visible(
    const std::vector<chamber::RenderedFrame>& frames, int min_pixels);

/// Renders a training split: per_condition frames for each of the four rearing
/// conditions (two objects crossed with two viewpoint ranges). Writes PNGs and
/// manifest.jsonl under out_dir and returns the manifest.
DatasetManifest build_training_set(const std::vector<RearingCondition>& conditions,
                                   int per_condition, uint64_t seed, const BuilderParams& params,
                                   const std::string& out_dir,
                                   const std::string& config_digest = "");

/// Renders the evaluation grid: per_cell frames for every (object, range) cell,
/// 2 objects x 12 ranges. Same layout as build_training_set.
DatasetManifest build_eval_set(int per_cell, uint64_t seed, const BuilderParams& params,
                               const std::string& out_dir, const std::string& config_digest = "");

/// Relative image path used inside a built dataset.
std::string frame_image_path(const RearingCondition& cond, int episode, int frame);

}  // namespace rearing::dataset
