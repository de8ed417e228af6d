#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rearing/chamber/types.hpp"

namespace rearing::dataset {

/// Decoded RGB8 image of arbitrary size.
struct PngImage {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;  // height*width*3
};

/// Writes an 8-bit RGB PNG. Throws DataError on I/O or encoder failure.
void write_png(const std::string& path, const chamber::Image8& img);

/// Reads a PNG as 8-bit RGB. Grayscale and paletted inputs are expanded,
/// alpha is stripped. Throws DataError if the file is missing or not decodable.
PngImage read_png(const std::string& path);

/// read_png plus a check that the image matches the fixed frame size.
chamber::Image8 read_frame_png(const std::string& path);

}  // namespace rearing::dataset
