#include "rearing/chamber/chamber.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rearing::chamber {

double animation_angle_deg(const AnimationState& anim) {
    anim.validate();
    const double u = anim.t / anim.period;
    const double frac = u - std::floor(u);
    const double tri = 1.0 - 2.0 * std::abs(frac - 0.5);  // 0 -> 1 -> 0 over one period
    return -anim.sweep / 2.0 + anim.sweep * tri;
}

Mat3 animate_object(const ViewpointRange& range, const AnimationState& anim) {
    range.validate();
    const double theta = deg2rad(animation_angle_deg(anim));
    return axis_angle(range.rotation_axis, theta) * range.base_orientation;
}

AgentPose step(const AgentPose& pose, AgentAction action, double dt,
               const ChamberSpec& chamber, const KinematicsParams& kin) {
    if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
    AgentPose p = pose;
    switch (action) {
        case AgentAction::Forward:
        case AgentAction::Backward: {
            const double sgn = action == AgentAction::Forward ? 1.0 : -1.0;
            p.x += sgn * kin.speed * dt * std::sin(p.yaw);
            p.z += sgn * kin.speed * dt * std::cos(p.yaw);
            break;
        }
        case AgentAction::RotateLeft:
            p.yaw = wrap_angle(p.yaw + deg2rad(kin.turn_rate_deg) * dt);
            break;
        case AgentAction::RotateRight:
            p.yaw = wrap_angle(p.yaw - deg2rad(kin.turn_rate_deg) * dt);
            break;
        case AgentAction::Noop:
            break;
    }
    const double bx = chamber.width / 2.0 - kin.agent_radius;
    const double bz = chamber.depth / 2.0 - kin.agent_radius;
    p.x = std::clamp(p.x, -bx, bx);
    p.z = std::clamp(p.z, -bz, bz);
    return p;
}

AgentAction random_policy(Pcg32& rng) {
    static const AgentAction acts[4] = {AgentAction::Forward, AgentAction::Backward,
                                        AgentAction::RotateLeft, AgentAction::RotateRight};
    return acts[rng.uniform_int(4)];
}

Vec3 object_anchor(const ChamberSpec& chamber, double r, const SceneParams& scene) {
    switch (chamber.display_wall_ids[0]) {
        case 0: return {0.0, scene.object_height, chamber.depth / 2.0 - r};
        case 1: return {0.0, scene.object_height, -chamber.depth / 2.0 + r};
        case 2: return {chamber.width / 2.0 - r, scene.object_height, 0.0};
        case 3: return {-chamber.width / 2.0 + r, scene.object_height, 0.0};
        default: throw std::invalid_argument("object_anchor: bad display wall id");
    }
}

namespace {

struct WorldTri {
    Vec3 a, b, c;
    std::array<double, 3> albedo;
    bool is_object;
};

struct CamVert {
    double x, y, z;
};

void scene_quad(std::vector<WorldTri>& out, const Vec3& p0, const Vec3& p1, const Vec3& p2, const Vec3& p3,
                const std::array<double, 3>& albedo) {
    out.push_back({p0, p1, p2, albedo, false});
    out.push_back({p0, p2, p3, albedo, false});
}

std::vector<WorldTri> assemble_scene(const ChamberSpec& ch, const ObjectSpec& obj, const Mat3& orientation,
                                     const SceneParams& scene) {
    std::vector<WorldTri> tris;
    tris.reserve(obj.mesh.size() + 12);
    const double hx = ch.width / 2.0, hz = ch.depth / 2.0, hy = ch.height;
    // Floor, ceiling, four walls.
    scene_quad(tris, {-hx, 0, -hz}, {hx, 0, -hz}, {hx, 0, hz}, {-hx, 0, hz}, ch.floor_albedo);
    scene_quad(tris, {-hx, hy, -hz}, {hx, hy, -hz}, {hx, hy, hz}, {-hx, hy, hz}, ch.wall_albedo);
    scene_quad(tris, {-hx, 0, hz}, {hx, 0, hz}, {hx, hy, hz}, {-hx, hy, hz}, ch.wall_albedo);    // +z
    scene_quad(tris, {-hx, 0, -hz}, {hx, 0, -hz}, {hx, hy, -hz}, {-hx, hy, -hz}, ch.wall_albedo);  // -z
    scene_quad(tris, {hx, 0, -hz}, {hx, 0, hz}, {hx, hy, hz}, {hx, hy, -hz}, ch.wall_albedo);    // +x
    scene_quad(tris, {-hx, 0, -hz}, {-hx, 0, hz}, {-hx, hy, hz}, {-hx, hy, -hz}, ch.wall_albedo);  // -x

    const Vec3 anchor = object_anchor(ch, bounding_radius(obj), scene);
    for (const auto& t : obj.mesh) {
        WorldTri wt;
        wt.a = anchor + orientation * (t.a - obj.centroid);
        wt.b = anchor + orientation * (t.b - obj.centroid);
        wt.c = anchor + orientation * (t.c - obj.centroid);
        wt.albedo = t.albedo;
        wt.is_object = true;
        tris.push_back(wt);
    }
    return tris;
}

inline double edge(double ax, double ay, double bx, double by, double px, double py) {
    return (bx - ax) * (py - ay) - (by - ay) * (px - ax);
}

}  // namespace

RenderedFrame render(const ChamberSpec& chamber, const ObjectSpec& object, const Mat3& orientation,
                     const AgentPose& pose, const SceneParams& scene) {
    chamber.validate();
    pose.validate(chamber);

    RenderedFrame frame;
    frame.meta.pose = pose;
    frame.meta.object_id = object.object_id;

    const int W = frame.image.w, H = frame.image.h;
    std::vector<double> wbuf(static_cast<std::size_t>(W) * H, 0.0);  // 1/z; larger = closer

    const Vec3 eye{pose.x, pose.camera_height, pose.z};
    const Vec3 fwd{std::sin(pose.yaw), 0.0, std::cos(pose.yaw)};
    const Vec3 right{std::cos(pose.yaw), 0.0, -std::sin(pose.yaw)};
    const Vec3 up{0.0, 1.0, 0.0};
    const double tan_half = std::tan(deg2rad(pose.fov) / 2.0);

    const auto scene_tris = assemble_scene(chamber, object, orientation, scene);

    for (const auto& tri : scene_tris) {
        // Flat Lambertian shading in world space, two-sided.
        Vec3 n = cross(tri.b - tri.a, tri.c - tri.a);
        const double n2 = norm(n);
        if (n2 <= 0.0) continue;  // degenerate triangle: skipped, not an error
        n = n * (1.0 / n2);
        if (dot(n, eye - tri.a) < 0.0) n = -n;
        const double lambert = std::max(0.0, dot(n, -chamber.light_direction));
        const double intensity = std::min(1.0, scene.ambient + scene.diffuse * lambert);
        std::uint8_t rgb[3];
        for (int ch = 0; ch < 3; ++ch)
            rgb[ch] = static_cast<std::uint8_t>(std::lround(255.0 * std::clamp(tri.albedo[ch] * intensity, 0.0, 1.0)));

        // To camera space.
        CamVert cv[3];
        const Vec3* wv[3] = {&tri.a, &tri.b, &tri.c};
        for (int i = 0; i < 3; ++i) {
            const Vec3 d = *wv[i] - eye;
            cv[i] = {dot(right, d), dot(up, d), dot(fwd, d)};
        }

        // Clip against the near plane.
        CamVert poly[4];
        int npoly = 0;
        for (int i = 0; i < 3; ++i) {
            const CamVert& cur = cv[i];
            const CamVert& nxt = cv[(i + 1) % 3];
            const bool cin = cur.z >= scene.znear;
            const bool nin = nxt.z >= scene.znear;
            if (cin) poly[npoly++] = cur;
            if (cin != nin) {
                const double t = (scene.znear - cur.z) / (nxt.z - cur.z);
                poly[npoly++] = {cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y), scene.znear};
            }
        }
        if (npoly < 3) continue;

        // Project and rasterize the clipped fan.
        double sx[4], sy[4], invz[4];
        for (int i = 0; i < npoly; ++i) {
            invz[i] = 1.0 / poly[i].z;
            sx[i] = (poly[i].x * invz[i] / tan_half + 1.0) * 0.5 * W;
            sy[i] = (1.0 - poly[i].y * invz[i] / tan_half) * 0.5 * H;
        }
        for (int f = 1; f + 1 < npoly; ++f) {
            const int idx[3] = {0, f, f + 1};
            const double x0 = sx[idx[0]], y0 = sy[idx[0]];
            const double x1 = sx[idx[1]], y1 = sy[idx[1]];
            const double x2 = sx[idx[2]], y2 = sy[idx[2]];
            const double area = edge(x0, y0, x1, y1, x2, y2);
            if (std::abs(area) < 1e-12) continue;

            const int minx = std::max(0, static_cast<int>(std::floor(std::min({x0, x1, x2}))));
            const int maxx = std::min(W - 1, static_cast<int>(std::ceil(std::max({x0, x1, x2}))));
            const int miny = std::max(0, static_cast<int>(std::floor(std::min({y0, y1, y2}))));
            const int maxy = std::min(H - 1, static_cast<int>(std::ceil(std::max({y0, y1, y2}))));

            for (int py = miny; py <= maxy; ++py) {
                for (int px = minx; px <= maxx; ++px) {
                    const double cx = px + 0.5, cyp = py + 0.5;
                    const double e0 = edge(x1, y1, x2, y2, cx, cyp) / area;
                    const double e1 = edge(x2, y2, x0, y0, cx, cyp) / area;
                    const double e2 = edge(x0, y0, x1, y1, cx, cyp) / area;
                    if (e0 < 0.0 || e1 < 0.0 || e2 < 0.0) continue;
                    const double w = e0 * invz[idx[0]] + e1 * invz[idx[1]] + e2 * invz[idx[2]];
                    double& slot = wbuf[static_cast<std::size_t>(py) * W + px];
                    if (w > slot) {
                        slot = w;
                        frame.image.at(py, px, 0) = rgb[0];
                        frame.image.at(py, px, 1) = rgb[1];
                        frame.image.at(py, px, 2) = rgb[2];
                        frame.mask.m[static_cast<std::size_t>(py) * W + px] = tri.is_object ? 1 : 0;
                    }
                }
            }
        }
    }
    return frame;
}

bool sphere_in_frustum(const ChamberSpec& chamber, const ObjectSpec& object, const AgentPose& pose,
                       const SceneParams& scene) {
    const double r = bounding_radius(object);
    const Vec3 anchor = object_anchor(chamber, r, scene);
    const Vec3 eye{pose.x, pose.camera_height, pose.z};
    const Vec3 fwd{std::sin(pose.yaw), 0.0, std::cos(pose.yaw)};
    const Vec3 right{std::cos(pose.yaw), 0.0, -std::sin(pose.yaw)};
    const Vec3 up{0.0, 1.0, 0.0};
    const Vec3 d = anchor - eye;
    const double xc = dot(right, d), yc = dot(up, d), zc = dot(fwd, d);
    if (zc + r < scene.znear) return false;
    const double t = std::tan(deg2rad(pose.fov) / 2.0);
    const double s = std::sqrt(1.0 + t * t);
    // Signed distances to the four side planes (positive inside).
    if ((zc * t - xc) / s < -r) return false;
    if ((zc * t + xc) / s < -r) return false;
    if ((zc * t - yc) / s < -r) return false;
    if ((zc * t + yc) / s < -r) return false;
    return true;
}

}  // namespace rearing::chamber
