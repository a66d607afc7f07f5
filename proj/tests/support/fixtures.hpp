#pragma once

// Shared test fixtures: scene paths, cached worlds, and small programmatic
// models that keep the unit tests independent from scene files where possible.

#include <string>

#include "bimanip/scene_io.hpp"
#include "bimanip/world.hpp"

#ifndef BIMANIP_SCENE_DIR
#define BIMANIP_SCENE_DIR "scenes"
#endif

namespace fixtures {

using namespace bimanip;

inline std::string scene_path(const std::string& name) {
    return std::string(BIMANIP_SCENE_DIR) + "/" + name;
}

// Worlds are immutable after load, so one cached copy per scene is safe.
inline const World& desk_box() {
    static const World w = load_scene(scene_path("desk_box.json"));
    return w;
}

inline const World& desk_lshape() {
    static const World w = load_scene(scene_path("desk_lshape.json"));
    return w;
}

// Axis-aligned cuboid object with uniform half-extent, COM at the centroid.
inline ObjectModel unit_box(double half = 0.5, double mass = 1.0) {
    ObjectModel obj;
    BoxShape s;
    s.half = Vec3(half, half, half);
    obj.links.push_back(s);
    obj.mass = mass;
    return obj;
}

// 6-dof arm with deliberately skewed joint axes and origins, exercising the
// general-axis code paths that the scene arms (axis-aligned) do not.
inline SerialArm skew_arm() {
    SerialArm arm;
    arm.name = "skew";
    arm.base.translation = Vec3(0.1, -0.2, 0.05);
    arm.base.rotation = Rotation::rot_z(0.3) * Rotation::rot_x(-0.1);

    const Vec3 axes[6] = {
        Vec3(0.2, 0.1, 1.0).normalized(),  Vec3(0.0, 1.0, 0.3).normalized(),
        Vec3(-0.3, 1.0, 0.0).normalized(), Vec3(1.0, 0.2, 0.2).normalized(),
        Vec3(0.1, 1.0, -0.2).normalized(), Vec3(0.0, 0.3, 1.0).normalized()};
    const Vec3 offsets[6] = {Vec3(0, 0, 0.2),     Vec3(0.05, 0, 0.25), Vec3(0, 0.02, 0.2),
                             Vec3(0.03, 0, 0.15), Vec3(0, -0.02, 0.1), Vec3(0, 0, 0.08)};
    for (int i = 0; i < 6; ++i) {
        RevoluteJoint j;
        j.axis = axes[i];
        j.origin.translation = offsets[i];
        j.origin.rotation = Rotation::rot_y(0.07 * (i + 1));
        j.lo = -3.0;
        j.hi = 3.0;
        arm.joints.push_back(j);
    }
    arm.tool.translation = Vec3(0.01, 0.0, 0.09);
    arm.tool.rotation = Rotation::rot_z(0.2);
    arm.link_shapes.assign(8, {});
    arm.branch_joints = {2, 4};
    arm.home = VecX::Zero(6);
    arm.validate();
    return arm;
}

}  // namespace fixtures
