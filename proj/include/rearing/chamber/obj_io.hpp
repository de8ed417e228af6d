#pragma once

#include <iosfwd>
#include <string>

#include "rearing/chamber/types.hpp"

namespace rearing::chamber {

/// Minimal OBJ subset: `v x y z` and triangular `f i j k` records (1-based
/// indices; `i/..` forms accepted, only the vertex index is used). Everything
/// else is ignored on import and never emitted on export.
void export_obj(const ObjectSpec& obj, std::ostream& os);
void export_obj_file(const ObjectSpec& obj, const std::string& path);

ObjectSpec import_obj(std::istream& is, int object_id,
                      const std::array<double, 3>& albedo = {0.85, 0.83, 0.80});
ObjectSpec import_obj_file(const std::string& path, int object_id,
                           const std::array<double, 3>& albedo = {0.85, 0.83, 0.80});

}  // namespace rearing::chamber
