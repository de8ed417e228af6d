#pragma once

#include <stdexcept>
#include <string>

namespace rearing {

/// Bad or missing data artifacts (manifests, images, checkpoints). CLI exit code 2.
struct DataError : std::runtime_error {
    explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite losses or diverged optimization. CLI exit code 3.
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rearing
