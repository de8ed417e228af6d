#include "rearing/chamber/types.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rearing::chamber {

void ChamberSpec::validate() const {
    if (width <= 0.0 || depth <= 0.0 || height <= 0.0)
        throw std::invalid_argument("chamber: dimensions must be positive");
    const auto ok_pair = [](int a, int b) { return (a == 0 && b == 1) || (a == 1 && b == 0) ||
                                                   (a == 2 && b == 3) || (a == 3 && b == 2); };
    if (!ok_pair(display_wall_ids[0], display_wall_ids[1]))
        throw std::invalid_argument("chamber: display walls must be two opposite walls");
    for (double a : wall_albedo)
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("chamber: wall albedo out of [0,1]");
    for (double a : floor_albedo)
        if (a < 0.0 || a > 1.0) throw std::invalid_argument("chamber: floor albedo out of [0,1]");
    if (std::abs(norm(light_direction) - 1.0) > 1e-6)
        throw std::invalid_argument("chamber: light_direction must be unit length");
}

Vec3 mesh_centroid(const std::vector<Triangle>& mesh) {
    Vec3 s;
    for (const auto& t : mesh) s = s + t.a + t.b + t.c;
    const double n = 3.0 * static_cast<double>(mesh.size());
    return n > 0.0 ? s * (1.0 / n) : s;
}

double bounding_radius(const ObjectSpec& obj) {
    double r2 = 0.0;
    for (const auto& t : obj.mesh)
        for (const Vec3* v : {&t.a, &t.b, &t.c}) {
            const Vec3 d = *v - obj.centroid;
            r2 = std::max(r2, dot(d, d));
        }
    return std::sqrt(r2);
}

void ObjectSpec::validate() const {
    if (object_id != 1 && object_id != 2)
        throw std::invalid_argument("object: object_id must be 1 or 2");
    if (mesh.empty()) throw std::invalid_argument("object: mesh is empty");
    const Vec3 c = mesh_centroid(mesh);
    if (norm(c - centroid) > 1e-6)
        throw std::invalid_argument("object: centroid does not match vertex mean");
    for (const auto& t : mesh)
        for (double a : t.albedo)
            if (a < 0.0 || a > 1.0) throw std::invalid_argument("object: albedo out of [0,1]");
}

void ViewpointRange::validate() const {
    if (index < 1 || index > 12)
        throw std::invalid_argument("viewpoint range index must be in 1..12, got " + std::to_string(index));
    if (std::abs(norm(rotation_axis) - 1.0) > 1e-6)
        throw std::invalid_argument("viewpoint range: rotation axis must be unit length");
}

ViewpointRange viewpoint_range(int index) {
    if (index < 1 || index > 12)
        throw std::invalid_argument("viewpoint range index must be in 1..12, got " + std::to_string(index));
    ViewpointRange r;
    r.index = index;
    const int axis = (index - 1) / 4;
    const int yaw_step = (index - 1) % 4;
    r.rotation_axis = axis == 0 ? Vec3{1, 0, 0} : axis == 1 ? Vec3{0, 1, 0} : Vec3{0, 0, 1};
    r.base_orientation = rot_y(deg2rad(90.0 * yaw_step));
    return r;
}

void AnimationState::validate() const {
    if (t < 0.0) throw std::invalid_argument("animation: t must be >= 0");
    if (period <= 0.0) throw std::invalid_argument("animation: period must be positive");
    if (sweep <= 0.0) throw std::invalid_argument("animation: sweep must be positive");
}

void AgentPose::validate(const ChamberSpec& chamber) const {
    if (std::abs(x) > chamber.width / 2.0 || std::abs(z) > chamber.depth / 2.0)
        throw std::invalid_argument("pose: position outside chamber footprint");
    if (!(fov > 0.0 && fov < 180.0))
        throw std::invalid_argument("pose: fov must be in (0, 180) degrees");
    if (camera_height <= 0.0 || camera_height >= chamber.height)
        throw std::invalid_argument("pose: camera height outside chamber");
}

}  // namespace rearing::chamber
