#pragma once

#include <vector>

#include "bimanip/transform.hpp"

namespace bimanip {

// Box primitive: local frame within its parent body plus half-extents.
struct BoxShape {
    Transform frame;
    Vec3 half = Vec3::Zero();
};

// Box instantiated in the world frame.
struct Obb {
    Mat3 axes = Mat3::Identity();  // columns are the box axes
    Vec3 center = Vec3::Zero();
    Vec3 half = Vec3::Zero();
};

inline Obb make_obb(const Transform& parent_world, const BoxShape& s) {
    const Transform w = parent_world * s.frame;
    return Obb{w.rotation.matrix(), w.translation, s.half};
}

// Separating-axis test for two oriented boxes. Contacts shallower than
// `contact_eps` (meters) do not count as overlap, so resting and grasping
// contact stays collision-free.
bool obb_overlap(const Obb& a, const Obb& b, double contact_eps = 1e-5);

// World-frame axis-aligned bounds of an OBB, for broad-phase pruning.
struct AabbBound {
    Vec3 lo;
    Vec3 hi;
};

inline AabbBound obb_bounds(const Obb& o) {
    const Vec3 ext = o.axes.cwiseAbs() * o.half;
    return {o.center - ext, o.center + ext};
}

inline bool aabb_overlap(const AabbBound& a, const AabbBound& b, double eps) {
    for (int i = 0; i < 3; ++i)
        if (a.lo[i] > b.hi[i] - eps || b.lo[i] > a.hi[i] - eps) return false;
    return true;
}

}  // namespace bimanip
