#pragma once

#include <vector>

#include "bimanip/collision.hpp"
#include "bimanip/kinematics.hpp"
#include "bimanip/result.hpp"
#include "bimanip/transform.hpp"

namespace bimanip {

// Movable object: a union of boxes.
struct ObjectModel {
    std::vector<BoxShape> links;
    double mass = 1.0;
    Vec3 center_of_mass = Vec3::Zero();

    void validate() const;
    // Corners of every link box, in the object frame.
    std::vector<Vec3> vertices() const;
};

// One face of the object's convex hull, i.e. one way to rest it on a surface.
struct PlacementClass {
    int id = 0;
    Vec3 normal = Vec3::UnitZ();  // outward, object frame, unit length
    double offset = 0.0;          // normal . x = offset on the face
    std::vector<Vec3> polygon;    // face vertices, object frame, CCW seen from outside
    bool stable = false;

    // Orthonormal face frame (u, v, normal); u deterministic.
    Mat3 face_frame() const;
};

// Element of the SE(2) placement parameterization.
struct PlacementCoord {
    int class_id = 0;
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;  // normalized to [0, 2*pi)
};

// Horizontal rectangle the object may rest on.
struct SupportSurface {
    Transform frame;       // z axis up, origin at the resting plane
    Vec2 half_extents = Vec2::Zero();
    double thickness = 0.02;  // collision slab below the resting plane

    BoxShape slab() const;
};

struct GripperGeometry {
    double stroke = 0.0;        // maximal jaw opening, meters
    double finger_depth = 0.0;  // pad extent along the approach axis
    Vec2 pad_half = Vec2::Zero();  // contact patch half-size (sliding, approach)
    std::vector<BoxShape> shapes;  // collision boxes in the gripper frame
};

struct World {
    std::vector<SerialArm> arms;  // exactly two
    GripperGeometry gripper;
    ObjectModel object;
    std::vector<SupportSurface> surfaces;
    std::vector<BoxShape> obstacles;  // world frame
    Vec3 gravity = Vec3(0, 0, -9.81);
    MetricWeights metric;
    double friction = 0.5;  // finger-pad friction coefficient
    int cone_edges = 8;     // friction-cone linearization

    std::vector<PlacementClass> placements;  // filled by finalize()

    void validate() const;
    // Computes placement classes from the object hull. Call after loading.
    void finalize();

    const PlacementClass& placement(int class_id) const;
};

// Placement classes of an object: one per convex-hull face (coplanar faces
// merged at normal tolerance 1e-6), stability by center-of-mass projection
// strictly inside the contact polygon shrunk by 1e-4 m. Throws on a
// degenerate (flat) hull.
std::vector<PlacementClass> convex_hull_placements(const ObjectModel& object);

// Object pose with the class's hull face flush on surface 0, the object
// origin's surface-frame projection at (x, y), rotated theta about the
// surface normal.
Transform placement_to_transform(const World& w, const PlacementCoord& p);

// Inverse of placement_to_transform. NO_CONTACT if the object is not resting
// on any surface, TILTED if it touches without a flush hull face.
Result<PlacementCoord> classify_placement(const World& w, const Transform& pose);

// True iff no box-pair overlap among arm links, object links, obstacles and
// surface slabs, except gripper-object pairs when grasp_active and shallow
// resting contact (handled by the SAT contact tolerance).
bool check_collision_free(const World& w, const CompositeConfig& c, bool grasp_active);

// As above for the object alone at pose T (no arms). Used by the placement
// connectivity analysis.
bool object_collision_free(const World& w, const Transform& pose);

}  // namespace bimanip
