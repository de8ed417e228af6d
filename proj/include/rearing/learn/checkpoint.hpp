#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rearing/learn/layers.hpp"

namespace rearing::learn {

/// Binary checkpoint: "RRCK" magic, format version, JSON header listing
/// tensors in order plus free-form metadata, then raw float32 data. Written
/// atomically (temp file + rename).
void save_checkpoint(const std::string& path, const std::vector<Param*>& params,
                     const std::vector<BufferRef>& buffers, const nlohmann::json& meta);

/// Loads values into an existing network whose parameter and buffer lists
/// must match the file by name and shape. Returns the stored metadata.
nlohmann::json load_checkpoint(const std::string& path, const std::vector<Param*>& params,
                               const std::vector<BufferRef>& buffers);

/// Reads only the metadata block.
nlohmann::json peek_checkpoint(const std::string& path);

}  // namespace rearing::learn
