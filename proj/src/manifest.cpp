#include "rearing/dataset/manifest.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "rearing/core/errors.hpp"
#include "rearing/dataset/png_io.hpp"

namespace rearing::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

void RearingCondition::validate() const {
    if (object_id != 1 && object_id != 2) {
        throw DataError("RearingCondition: object_id must be 1 or 2, got " +
                        std::to_string(object_id));
    }
    if (viewpoint_range < 1 || viewpoint_range > 12) {
        throw DataError("RearingCondition: viewpoint_range must be in 1..12, got " +
                        std::to_string(viewpoint_range));
    }
}

bool record_less(const ManifestRecord& a, const ManifestRecord& b) {
    return std::tie(a.object_id, a.viewpoint_range, a.episode, a.frame) <
           std::tie(b.object_id, b.viewpoint_range, b.episode, b.frame);
}

void DatasetManifest::validate() const {
    if (schema_version != kManifestSchemaVersion) {
        throw DataError("manifest: unsupported schema_version " + std::to_string(schema_version));
    }
    if (split_tag != "train" && split_tag != "eval") {
        throw DataError("manifest: split_tag must be train or eval, got '" + split_tag + "'");
    }
    std::set<std::string> paths;
    for (size_t i = 0; i < records.size(); ++i) {
        const ManifestRecord& r = records[i];
        if (r.image_path.empty() || r.image_path.front() == '/') {
            throw DataError("manifest: record " + std::to_string(i) +
                            " image_path must be relative and nonempty");
        }
        if (!paths.insert(r.image_path).second) {
            throw DataError("manifest: duplicate image_path " + r.image_path);
        }
        RearingCondition{r.object_id, r.viewpoint_range}.validate();
        if (r.episode < 0 || r.frame < 0) {
            throw DataError("manifest: record " + std::to_string(i) +
                            " has negative episode or frame index");
        }
        if (r.mask_pixels < 0) {
            throw DataError("manifest: record " + std::to_string(i) + " has negative mask_pixels");
        }
        if (r.split_tag != split_tag) {
            throw DataError("manifest: record " + std::to_string(i) + " split_tag '" +
                            r.split_tag + "' does not match manifest '" + split_tag + "'");
        }
        if (i > 0 && !record_less(records[i - 1], r)) {
            throw DataError("manifest: records out of order at index " + std::to_string(i));
        }
    }
    if (stats.kept_frames != static_cast<int64_t>(records.size())) {
        throw DataError("manifest: stats.kept_frames disagrees with record count");
    }
}

json record_to_json(const ManifestRecord& r) {
    return json{{"image_path", r.image_path},
                {"object_id", r.object_id},
                {"viewpoint_range", r.viewpoint_range},
                {"episode", r.episode},
                {"frame", r.frame},
                {"t", r.t},
                {"agent_x", r.agent_x},
                {"agent_z", r.agent_z},
                {"agent_yaw", r.agent_yaw},
                {"mask_pixels", r.mask_pixels},
                {"split_tag", r.split_tag}};
}

ManifestRecord record_from_json(const json& j) {
    ManifestRecord r;
    try {
        r.image_path = j.at("image_path").get<std::string>();
        r.object_id = j.at("object_id").get<int>();
        r.viewpoint_range = j.at("viewpoint_range").get<int>();
        r.episode = j.at("episode").get<int>();
        r.frame = j.at("frame").get<int>();
        r.t = j.at("t").get<double>();
        r.agent_x = j.at("agent_x").get<double>();
        r.agent_z = j.at("agent_z").get<double>();
        r.agent_yaw = j.at("agent_yaw").get<double>();
        r.mask_pixels = j.at("mask_pixels").get<int>();
        r.split_tag = j.at("split_tag").get<std::string>();
    } catch (const json::exception& e) {
        throw DataError(std::string("manifest record: ") + e.what());
    }
    return r;
}

void save_manifest(const DatasetManifest& m, const std::string& path) {
    m.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("save_manifest: cannot open " + path);
    json header{{"schema_version", m.schema_version},
                {"kind", "rearing-dataset-manifest"},
                {"split_tag", m.split_tag},
                {"config_digest", m.config_digest},
                {"seed", m.seed},
                {"raw_frames", m.stats.raw_frames},
                {"kept_frames", m.stats.kept_frames},
                {"retention", m.stats.retention()}};
    out << header.dump() << '\n';
    for (const ManifestRecord& r : m.records) {
        out << record_to_json(r).dump() << '\n';
    }
    if (!out) throw DataError("save_manifest: write failed for " + path);
}

DatasetManifest load_manifest(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("load_manifest: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw DataError("load_manifest: empty file " + path);

    DatasetManifest m;
    try {
        json header = json::parse(line);
        if (header.value("kind", "") != "rearing-dataset-manifest") {
            throw DataError("load_manifest: " + path + " is not a dataset manifest");
        }
        m.schema_version = header.at("schema_version").get<int>();
        m.split_tag = header.at("split_tag").get<std::string>();
        m.config_digest = header.value("config_digest", "");
        m.seed = header.value("seed", uint64_t{0});
        m.stats.raw_frames = header.at("raw_frames").get<int64_t>();
        m.stats.kept_frames = header.at("kept_frames").get<int64_t>();
    } catch (const json::exception& e) {
        throw DataError("load_manifest: bad header in " + path + ": " + e.what());
    }

    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw DataError("load_manifest: " + path + ":" + std::to_string(lineno) + ": " +
                            e.what());
        }
        m.records.push_back(record_from_json(j));
    }
    m.validate();
    return m;
}

void validate_manifest(const DatasetManifest& m, const std::string& manifest_path,
                       bool check_images) {
    m.validate();
    if (!check_images) return;
    fs::path dir = fs::path(manifest_path).parent_path();
    for (const ManifestRecord& r : m.records) {
        fs::path p = dir / r.image_path;
        if (!fs::exists(p)) throw DataError("manifest: missing image " + p.string());
        read_frame_png(p.string());
    }
}

}  // namespace rearing::dataset
