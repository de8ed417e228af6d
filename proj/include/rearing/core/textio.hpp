#pragma once

#include <filesystem>
#include <string>

namespace rearing {

/// Writes via a sibling temp file and renames into place, so readers never
/// observe a partial file. Throws DataError with the path on failure.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);

std::string read_text(const std::filesystem::path& path);

}  // namespace rearing
