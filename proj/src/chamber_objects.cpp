#include "rearing/chamber/objects.hpp"

#include <cmath>
#include <stdexcept>

namespace rearing::chamber {

std::vector<Triangle> make_box(const Vec3& center, const Vec3& size, const std::array<double, 3>& albedo) {
    const double hx = size.x / 2.0, hy = size.y / 2.0, hz = size.z / 2.0;
    Vec3 v[8];
    for (int i = 0; i < 8; ++i)
        v[i] = {center.x + ((i & 1) ? hx : -hx), center.y + ((i & 2) ? hy : -hy), center.z + ((i & 4) ? hz : -hz)};
    // Each face split into two triangles, outward winding.
    static const int faces[6][4] = {
        {0, 2, 3, 1},  // -z
        {4, 5, 7, 6},  // +z
        {0, 1, 5, 4},  // -y
        {2, 6, 7, 3},  // +y
        {0, 4, 6, 2},  // -x
        {1, 3, 7, 5},  // +x
    };
    std::vector<Triangle> tris;
    tris.reserve(12);
    for (const auto& f : faces) {
        tris.push_back({v[f[0]], v[f[1]], v[f[2]], albedo});
        tris.push_back({v[f[0]], v[f[2]], v[f[3]], albedo});
    }
    return tris;
}

std::vector<Triangle> make_wedge(const Vec3& p0, const Vec3& p1, const Vec3& p2, double depth,
                                 const std::array<double, 3>& albedo) {
    const double hz = depth / 2.0;
    const Vec3 a0{p0.x, p0.y, p0.z - hz}, b0{p1.x, p1.y, p1.z - hz}, c0{p2.x, p2.y, p2.z - hz};
    const Vec3 a1{p0.x, p0.y, p0.z + hz}, b1{p1.x, p1.y, p1.z + hz}, c1{p2.x, p2.y, p2.z + hz};
    std::vector<Triangle> tris;
    tris.push_back({a0, c0, b0, albedo});
    tris.push_back({a1, b1, c1, albedo});
    for (auto [u0, v0, u1, v1] : {std::array<Vec3, 4>{a0, b0, a1, b1},
                                  std::array<Vec3, 4>{b0, c0, b1, c1},
                                  std::array<Vec3, 4>{c0, a0, c1, a1}}) {
        tris.push_back({u0, v0, u1, albedo});
        tris.push_back({v0, v1, u1, albedo});
    }
    return tris;
}

namespace {

void append(std::vector<Triangle>& dst, const std::vector<Triangle>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

/// Recenter on the vertex mean and scale so the bounding-sphere radius is r.
ObjectSpec finalize(int object_id, std::vector<Triangle> mesh, double r) {
    ObjectSpec obj;
    obj.object_id = object_id;
    const Vec3 c = mesh_centroid(mesh);
    double maxd = 0.0;
    for (auto& t : mesh)
        for (Vec3* v : {&t.a, &t.b, &t.c}) {
            *v = *v - c;
            maxd = std::max(maxd, norm(*v));
        }
    const double s = r / maxd;
    for (auto& t : mesh)
        for (Vec3* v : {&t.a, &t.b, &t.c}) *v = *v * s;
    obj.mesh = std::move(mesh);
    obj.centroid = mesh_centroid(obj.mesh);
    obj.validate();
    return obj;
}

constexpr std::array<double, 3> kStimulusAlbedo = {0.85, 0.83, 0.80};

}  // namespace

ObjectSpec stimulus_object(int object_id, double radius) {
    std::vector<Triangle> mesh;
    if (object_id == 1) {
        // Tall pillar with a high crossbar and a slanted lower fin.
        append(mesh, make_box({0.0, 0.0, 0.0}, {0.06, 0.22, 0.06}, kStimulusAlbedo));
        append(mesh, make_box({0.0, 0.07, 0.0}, {0.24, 0.05, 0.05}, kStimulusAlbedo));
        append(mesh, make_wedge({-0.03, -0.05, 0.0}, {-0.13, -0.12, 0.0}, {-0.03, -0.11, 0.0}, 0.045,
                                kStimulusAlbedo));
    } else if (object_id == 2) {
        // Low horizontal bar, vertical block at one end, upward fin at the other.
        append(mesh, make_box({0.0, -0.07, 0.0}, {0.24, 0.07, 0.07}, kStimulusAlbedo));
        append(mesh, make_box({0.085, 0.03, 0.0}, {0.07, 0.20, 0.07}, kStimulusAlbedo));
        append(mesh, make_wedge({-0.085, -0.03, 0.0}, {-0.045, 0.10, 0.0}, {-0.125, 0.10, 0.0}, 0.05,
                                kStimulusAlbedo));
    } else {
        throw std::invalid_argument("stimulus_object: object_id must be 1 or 2");
    }
    return finalize(object_id, std::move(mesh), radius);
}

}  // namespace rearing::chamber
