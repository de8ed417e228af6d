#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "rearing/chamber/geom.hpp"

namespace rearing::chamber {

constexpr int kFrameSize = 64;

/// Wall ids: 0 = +z, 1 = -z, 2 = +x, 3 = -x.
struct ChamberSpec {
    double width = 0.8;   // x extent, meters
    double depth = 0.8;   // z extent
    double height = 0.6;  // y extent
    std::array<int, 2> display_wall_ids = {0, 1};
    std::array<double, 3> wall_albedo = {0.22, 0.24, 0.27};
    std::array<double, 3> floor_albedo = {0.34, 0.33, 0.32};
    Vec3 light_direction = {0.30151134457776363, -0.90453403373329089, 0.30151134457776363};

    void validate() const;
};

struct Triangle {
    Vec3 a, b, c;
    std::array<double, 3> albedo = {0.8, 0.8, 0.8};
};

struct ObjectSpec {
    int object_id = 1;  // 1 or 2
    std::vector<Triangle> mesh;
    Vec3 centroid;

    void validate() const;
};

/// Mean of all listed triangle vertex positions.
Vec3 mesh_centroid(const std::vector<Triangle>& mesh);
/// Max vertex distance from the centroid.
double bounding_radius(const ObjectSpec& obj);

struct ViewpointRange {
    int index = 1;  // 1..12
    Vec3 rotation_axis = {0, 1, 0};
    Mat3 base_orientation;

    void validate() const;
};

/// The 12 ranges: 3 rotation axes (x, y, z) x 4 base yaw offsets (0/90/180/270 deg).
ViewpointRange viewpoint_range(int index);

struct AnimationState {
    double t = 0.0;        // seconds
    double period = 6.0;   // full back-and-forth, seconds
    double sweep = 60.0;   // degrees

    void validate() const;
};

struct AgentPose {
    double x = 0.0, z = 0.0;      // floor-plane position, meters
    double yaw = 0.0;             // radians; 0 faces +z, positive turns left (toward +x)
    double camera_height = 0.25;  // meters
    double fov = 90.0;            // vertical field of view, degrees

    void validate(const ChamberSpec& chamber) const;
};

enum class AgentAction : std::uint8_t { Forward, Backward, RotateLeft, RotateRight, Noop };

struct Image8 {
    int w = kFrameSize, h = kFrameSize;
    std::vector<std::uint8_t> rgb;  // h*w*3

    Image8() : rgb(static_cast<std::size_t>(kFrameSize) * kFrameSize * 3, 0) {}
    std::uint8_t& at(int y, int x, int ch) { return rgb[(static_cast<std::size_t>(y) * w + x) * 3 + ch]; }
    std::uint8_t at(int y, int x, int ch) const { return rgb[(static_cast<std::size_t>(y) * w + x) * 3 + ch]; }
};

struct Mask {
    int w = kFrameSize, h = kFrameSize;
    std::vector<std::uint8_t> m;  // 1 where the front-most surface is an object triangle

    Mask() : m(static_cast<std::size_t>(kFrameSize) * kFrameSize, 0) {}
    int count() const {
        int n = 0;
        for (auto v : m) n += v != 0;
        return n;
    }
};

struct FrameMeta {
    int object_id = 0;
    int viewpoint_range = 0;
    double t = 0.0;
    AgentPose pose;
};

struct RenderedFrame {
    Image8 image;
    Mask mask;
    FrameMeta meta;
};

}  // namespace rearing::chamber
