#include "rearing/dataset/builder.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "rearing/chamber/objects.hpp"
#include "rearing/core/errors.hpp"
#include "rearing/core/parallel.hpp"
#include "rearing/core/rng.hpp"
#include "rearing/dataset/png_io.hpp"

namespace rearing::dataset {

namespace fs = std::filesystem;
using chamber::RenderedFrame;

void BuilderParams::validate() const {
    chamber.validate();
    if (capture_hz <= 0) throw std::invalid_argument("BuilderParams: capture_hz must be positive");
    if (anim_period_s <= 0 || anim_sweep_deg <= 0) {
        throw std::invalid_argument("BuilderParams: animation period and sweep must be positive");
    }
    if (object_radius <= 0) throw std::invalid_argument("BuilderParams: object_radius must be positive");
    if (min_pixels < 0) throw std::invalid_argument("BuilderParams: min_pixels must be >= 0");
    if (train_episodes < 1 || eval_episodes < 1) {
        throw std::invalid_argument("BuilderParams: episode counts must be >= 1");
    }
    if (max_raw_factor < 2) throw std::invalid_argument("BuilderParams: max_raw_factor must be >= 2");
    chamber::AgentPose probe{0.0, 0.0, 0.0, camera_height, fov_deg};
    probe.validate(chamber);
}

bool object_visible(const RenderedFrame& frame, int min_pixels) {
    return frame.mask.count() >= min_pixels;
}

std::vector<RenderedFrame> filter_object_visible(const std::vector<RenderedFrame>& frames,
                                                 int min_pixels) {
    std::vector<RenderedFrame> kept;
    for (const RenderedFrame& f : frames) {
        if (object_visible(f, min_pixels)) kept.push_back(f);
    }
    return kept;
}

namespace {

/// Core episode loop. Calls sink(frame, kept_index) for each frame that passes
/// the visibility filter, until n_frames have been delivered.
template <class Sink>
EpisodeStats run_episode(const RearingCondition& cond, int n_frames, uint64_t seed,
                         const BuilderParams& params, Sink&& sink) {
    cond.validate();
    params.validate();
    if (n_frames < 1) throw std::invalid_argument("collect_episode: n_frames must be > 0");

    EpisodeStats stats;

    Pcg32 rng(seed);
    chamber::ObjectSpec object = chamber::stimulus_object(cond.object_id, params.object_radius);
    chamber::ViewpointRange range = chamber::viewpoint_range(cond.viewpoint_range);
    chamber::AnimationState anim{0.0, params.anim_period_s, params.anim_sweep_deg};

    chamber::AgentPose pose;
    pose.x = 0.0;
    pose.z = 0.0;
    pose.yaw = rng.uniform(-chamber::kPi, chamber::kPi);
    pose.camera_height = params.camera_height;
    pose.fov = params.fov_deg;
    pose.validate(params.chamber);

    const double dt = 1.0 / params.capture_hz;
    const int64_t raw_cap = static_cast<int64_t>(params.max_raw_factor) * n_frames;
    int kept = 0;
    while (kept < n_frames) {
        if (stats.raw_frames >= raw_cap) {
            throw DataError("collect_episode: retention too low for condition (object " +
                            std::to_string(cond.object_id) + ", viewpoint range " +
                            std::to_string(cond.viewpoint_range) + "): kept " +
                            std::to_string(kept) + "/" + std::to_string(n_frames) + " after " +
                            std::to_string(stats.raw_frames) + " renders");
        }
        chamber::AgentAction action = chamber::random_policy(rng);
        pose = chamber::step(pose, action, dt, params.chamber, params.kinematics);
        chamber::Mat3 orientation = chamber::animate_object(range, anim);
        RenderedFrame frame = chamber::render(params.chamber, object, orientation, pose, params.scene);
        frame.meta.object_id = cond.object_id;
        frame.meta.viewpoint_range = cond.viewpoint_range;
        frame.meta.t = anim.t;
        frame.meta.pose = pose;
        ++stats.raw_frames;
        anim.t += dt;
        if (object_visible(frame, params.min_pixels)) {
            sink(frame, kept);
            ++kept;
            ++stats.kept_frames;
        }
    }
    return stats;
}

struct EpisodeJob {
    RearingCondition cond;
    int episode = 0;
    int n_frames = 0;
    uint64_t seed = 0;
};

struct EpisodeResult {
    std::vector<ManifestRecord> records;
    EpisodeStats stats;
    std::string error;  // nonempty if the episode failed
};

/// Renders all jobs (episodes are independent, so they parallelize cleanly),
/// writes PNGs under out_dir, and assembles the manifest in job order.
DatasetManifest run_jobs(const std::vector<EpisodeJob>& jobs, const std::string& split_tag,
                         uint64_t seed, const BuilderParams& params, const std::string& out_dir,
                         const std::string& config_digest) {
    fs::create_directories(out_dir);
    std::set<std::string> dirs;
    for (const EpisodeJob& j : jobs) {
        fs::path rel = frame_image_path(j.cond, j.episode, 0);
        dirs.insert((fs::path(out_dir) / rel.parent_path()).string());
    }
    for (const std::string& d : dirs) fs::create_directories(d);

    std::vector<EpisodeResult> results(jobs.size());
    par::for_n(static_cast<int64_t>(jobs.size()), [&](int64_t i) {
        const EpisodeJob& job = jobs[static_cast<size_t>(i)];
        EpisodeResult& res = results[static_cast<size_t>(i)];
        try {
            res.stats = run_episode(job.cond, job.n_frames, job.seed, params,
                                    [&](const RenderedFrame& frame, int kept_idx) {
                                        std::string rel =
                                            frame_image_path(job.cond, job.episode, kept_idx);
                                        write_png((fs::path(out_dir) / rel).string(), frame.image);
                                        ManifestRecord r;
                                        r.image_path = rel;
                                        r.object_id = job.cond.object_id;
                                        r.viewpoint_range = job.cond.viewpoint_range;
                                        r.episode = job.episode;
                                        r.frame = kept_idx;
                                        r.t = frame.meta.t;
                                        r.agent_x = frame.meta.pose.x;
                                        r.agent_z = frame.meta.pose.z;
                                        r.agent_yaw = frame.meta.pose.yaw;
                                        r.mask_pixels = frame.mask.count();
                                        r.split_tag = split_tag;
                                        res.records.push_back(std::move(r));
                                    });
        } catch (const std::exception& e) {
            res.error = e.what();
        }
    });

    DatasetManifest m;
    m.split_tag = split_tag;
    m.config_digest = config_digest;
    m.seed = seed;
    for (const EpisodeResult& res : results) {
        if (!res.error.empty()) throw DataError(res.error);
        m.stats.raw_frames += res.stats.raw_frames;
        m.stats.kept_frames += res.stats.kept_frames;
        m.records.insert(m.records.end(), res.records.begin(), res.records.end());
    }
    std::sort(m.records.begin(), m.records.end(), record_less);
    save_manifest(m, (fs::path(out_dir) / "manifest.jsonl").string());
    return m;
}

/// Splits `total` frames over `episodes` episodes, remainder to the earliest.
std::vector<int> frame_split(int total, int episodes) {
    std::vector<int> out(static_cast<size_t>(episodes), total / episodes);
    for (int e = 0; e < total % episodes; ++e) out[static_cast<size_t>(e)] += 1;
    return out;
}

constexpr uint64_t kTrainStreamKey = 1;
constexpr uint64_t kEvalStreamKey = 2;

}  // namespace

std::vector<RenderedFrame> collect_episode(const RearingCondition& cond, int n_frames,
                                           uint64_t seed, const BuilderParams& params,
                                           EpisodeStats* stats) {
    std::vector<RenderedFrame> frames;
    frames.reserve(static_cast<size_t>(std::max(n_frames, 0)));
    EpisodeStats s = run_episode(cond, n_frames, seed, params,
                                 [&](const RenderedFrame& f, int) { frames.push_back(f); });
    if (stats) *stats = s;
    return frames;
}

std::string frame_image_path(const RearingCondition& cond, int episode, int frame) {
    char buf[80];
    std::snprintf(buf, sizeof(buf), "images/obj%d_vp%02d/ep%03d_f%05d.png", cond.object_id,
                  cond.viewpoint_range, episode, frame);
    return buf;
}

DatasetManifest build_training_set(const std::vector<RearingCondition>& conditions,
                                   int per_condition, uint64_t seed, const BuilderParams& params,
                                   const std::string& out_dir, const std::string& config_digest) {
    params.validate();
    if (per_condition < 1) throw std::invalid_argument("build_training_set: per_condition must be >= 1");
    if (conditions.size() != 4) {
        throw DataError("build_training_set: expected 4 rearing conditions, got " +
                        std::to_string(conditions.size()));
    }
    std::set<int> objects, ranges;
    std::set<std::pair<int, int>> cells;
    for (const RearingCondition& c : conditions) {
        c.validate();
        objects.insert(c.object_id);
        ranges.insert(c.viewpoint_range);
        cells.insert({c.object_id, c.viewpoint_range});
    }
    if (objects.size() != 2 || ranges.size() != 2 || cells.size() != 4) {
        throw DataError(
            "build_training_set: conditions must be the full cross of 2 objects and 2 "
            "viewpoint ranges");
    }

    std::vector<RearingCondition> sorted = conditions;
    std::sort(sorted.begin(), sorted.end(), [](const RearingCondition& a, const RearingCondition& b) {
        return std::tie(a.object_id, a.viewpoint_range) < std::tie(b.object_id, b.viewpoint_range);
    });

    std::vector<EpisodeJob> jobs;
    std::vector<int> split = frame_split(per_condition, params.train_episodes);
    for (const RearingCondition& c : sorted) {
        for (int e = 0; e < params.train_episodes; ++e) {
            if (split[static_cast<size_t>(e)] == 0) continue;
            uint64_t s = derive_stream(seed, {kTrainStreamKey, static_cast<uint64_t>(c.object_id),
                                              static_cast<uint64_t>(c.viewpoint_range),
                                              static_cast<uint64_t>(e)});
            jobs.push_back({c, e, split[static_cast<size_t>(e)], s});
        }
    }
    return run_jobs(jobs, "train", seed, params, out_dir, config_digest);
}

DatasetManifest build_eval_set(int per_cell, uint64_t seed, const BuilderParams& params,
                               const std::string& out_dir, const std::string& config_digest) {
    params.validate();
    if (per_cell < 1) throw std::invalid_argument("build_eval_set: per_cell must be >= 1");

    std::vector<EpisodeJob> jobs;
    std::vector<int> split = frame_split(per_cell, params.eval_episodes);
    for (int obj = 1; obj <= 2; ++obj) {
        for (int vp = 1; vp <= 12; ++vp) {
            RearingCondition c{obj, vp};
            for (int e = 0; e < params.eval_episodes; ++e) {
                if (split[static_cast<size_t>(e)] == 0) continue;
                uint64_t s = derive_stream(seed, {kEvalStreamKey, static_cast<uint64_t>(obj),
                                                  static_cast<uint64_t>(vp),
                                                  static_cast<uint64_t>(e)});
                jobs.push_back({c, e, split[static_cast<size_t>(e)], s});
            }
        }
    }
    return run_jobs(jobs, "eval", seed, params, out_dir, config_digest);
}

}  // namespace rearing::dataset
