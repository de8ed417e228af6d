#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rearing::dataset {

constexpr int kManifestSchemaVersion = 1;

/// One rearing condition: which object the agent lives with and which
/// viewpoint range the object is animated through.
struct RearingCondition {
    int object_id = 1;        // 1 or 2
    int viewpoint_range = 1;  // 1..12

    void validate() const;
    bool operator==(const RearingCondition&) const = default;
};

struct ManifestRecord {
    std::string image_path;  // relative to the manifest's directory
    int object_id = 0;
    int viewpoint_range = 0;
    int episode = 0;
    int frame = 0;        // index within the episode, post filtering
    double t = 0.0;       // animation clock at capture
    double agent_x = 0.0;
    double agent_z = 0.0;
    double agent_yaw = 0.0;
    int mask_pixels = 0;  // object pixels in the frame
    std::string split_tag;  // "train" or "eval"
};

/// Sort key used for the deterministic on-disk record order.
bool record_less(const ManifestRecord& a, const ManifestRecord& b);

struct DatasetStats {
    int64_t raw_frames = 0;   // frames rendered, before visibility filtering
    int64_t kept_frames = 0;  // frames written
    double retention() const {
        return raw_frames > 0 ? static_cast<double>(kept_frames) / static_cast<double>(raw_frames)
                              : 0.0;
    }
};

struct DatasetManifest {
    int schema_version = kManifestSchemaVersion;
    std::string split_tag;      // "train" or "eval"
    std::string config_digest;  // hex digest of the builder config, for content addressing
    uint64_t seed = 0;
    DatasetStats stats;
    std::vector<ManifestRecord> records;

    /// Structural checks that need no file I/O: schema version, sorted order,
    /// unique paths, fields in range, per-record split tags matching.
    void validate() const;
};

/// Writes header line plus one JSON record per line. The parent directory must exist.
void save_manifest(const DatasetManifest& m, const std::string& path);

/// Parses a manifest file. Throws DataError on syntax or schema problems.
DatasetManifest load_manifest(const std::string& path);

/// validate() plus, when check_images is set, a decode of every referenced
/// image (resolved relative to the manifest's directory) with a frame-size check.
void validate_manifest(const DatasetManifest& m, const std::string& manifest_path,
                       bool check_images);

nlohmann::json record_to_json(const ManifestRecord& r);
ManifestRecord record_from_json(const nlohmann::json& j);

}  // namespace rearing::dataset
