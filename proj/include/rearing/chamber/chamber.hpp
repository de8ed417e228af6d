#pragma once

#include "rearing/chamber/types.hpp"
#include "rearing/core/rng.hpp"

namespace rearing::chamber {

/// Scene constants that are not part of the chamber geometry proper.
struct SceneParams {
    double object_height = 0.30;  // centroid height above the floor, meters
    double ambient = 0.35;
    double diffuse = 0.65;
    double znear = 0.02;
};

struct KinematicsParams {
    double speed = 0.2;                    // m/s
    double turn_rate_deg = 90.0;           // deg/s
    double agent_radius = 0.06;            // wall clearance, meters
};

/// Orientation of the object at animation time t: the range's base orientation
/// composed with a rotation about its axis by a triangle-wave angle that
/// sweeps [-sweep/2, +sweep/2] once per period.
Mat3 animate_object(const ViewpointRange& range, const AnimationState& anim);

/// The signed sweep angle theta(t) in degrees (exposed for tests).
double animation_angle_deg(const AnimationState& anim);

AgentPose step(const AgentPose& pose, AgentAction action, double dt,
               const ChamberSpec& chamber, const KinematicsParams& kin = {});

/// One of the four movement actions, uniformly. Never Noop.
AgentAction random_policy(Pcg32& rng);

/// World-space anchor of the object centroid on the active display wall.
Vec3 object_anchor(const ChamberSpec& chamber, double bounding_radius, const SceneParams& scene = {});

/// Rasterize the chamber + object to a 64x64 frame. Deterministic: equal
/// inputs give byte-equal images and masks.
RenderedFrame render(const ChamberSpec& chamber, const ObjectSpec& object, const Mat3& orientation,
                     const AgentPose& pose, const SceneParams& scene = {});

/// Conservative frustum test: returns false only when the sphere is certainly
/// outside the viewing frustum.
bool sphere_in_frustum(const ChamberSpec& chamber, const ObjectSpec& object, const AgentPose& pose,
                       const SceneParams& scene = {});

}  // namespace rearing::chamber
