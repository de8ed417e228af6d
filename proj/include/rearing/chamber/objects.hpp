#pragma once

#include "rearing/chamber/types.hpp"

namespace rearing::chamber {

/// The two stimulus objects: fixed procedural fin/block assemblies, centered
/// on their centroid and scaled to a common bounding-sphere radius so neither
/// is systematically larger on screen. Both share one albedo; they differ in
/// shape only.
ObjectSpec stimulus_object(int object_id, double radius = 0.12);

/// Axis-aligned box as 12 triangles.
std::vector<Triangle> make_box(const Vec3& center, const Vec3& size, const std::array<double, 3>& albedo);

/// Triangular prism: cross-section (p0, p1, p2) in the xy plane extruded along z.
std::vector<Triangle> make_wedge(const Vec3& p0, const Vec3& p1, const Vec3& p2, double depth,
                                 const std::array<double, 3>& albedo);

}  // namespace rearing::chamber
