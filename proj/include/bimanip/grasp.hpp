#pragma once

#include <vector>

#include "bimanip/result.hpp"
#include "bimanip/world.hpp"

namespace bimanip {

// Axis codes 1..6 map to +x, +y, +z, -x, -y, -z of the link frame.
Vec3 axis_from_code(int code);

// Parallel-jaw grasp on one link: approach axis a, sliding axis b (must be
// orthogonal to a) and normalized sliding position delta in (0, 1). The
// lateral (jaw-closing) axis is sliding x approach.
struct GraspParams {
    int link = 0;
    int approach = 1;
    int sliding = 2;
    double delta = 0.5;
    double tilt = 0.0;  // about the fingertip axis; 0 unless validation needs it

    void validate(const ObjectModel& object) const;
};

struct BimanualGrasp {
    GraspParams g1;
    GraspParams g2;
};

// Grasps sharing (arm, link, approach) form one class; delta varies
// continuously inside a class.
struct GraspClassId {
    int arm = 0;
    int link = 0;
    int approach = 1;

    friend bool operator==(const GraspClassId&, const GraspClassId&) = default;
};

inline GraspClassId grasp_class_of(int arm, const GraspParams& g) {
    return {arm, g.link, g.approach};
}

// True iff a jaw with this approach/sliding choice fits the link: the lateral
// dimension must fit within the stroke and the fingers must be long enough to
// put the pads onto the side faces.
bool grasp_fits(const ObjectModel& object, const GripperGeometry& gripper, int link,
                int approach, int sliding);

// All (l, a) classes graspable by either arm. Each geometric class appears
// once per arm id.
std::vector<GraspClassId> enumerate_grasp_classes(const ObjectModel& object,
                                                  const GripperGeometry& gripper);

// World gripper pose realizing the grasp on the object at `object_pose`.
Transform grasp_to_gripper_pose(const Transform& object_pose, const GraspParams& g,
                                const ObjectModel& object, const GripperGeometry& gripper);

// Nominal gripper collision boxes at a grasp pose.
std::vector<Obb> gripper_obbs_at(const Transform& gripper_pose, const GripperGeometry& gripper);

bool grippers_overlap(const Transform& object_pose, const BimanualGrasp& g,
                      const ObjectModel& object, const GripperGeometry& gripper);

struct GraspIk {
    VecX q1;
    VecX q2;
};

// IK for both grippers (differential IK from a seed grid) such that the
// composite configuration is collision-free with the grasp active and
// non-singular for both arms.
Result<GraspIk> validate_bimanual_grasp(const World& w, const Transform& object_pose,
                                        const BimanualGrasp& g, int seed_count = 16);

// Static equilibrium of the grasped object: LP feasibility of balancing the
// gravity wrench with nonnegative combinations of linearized friction-cone
// edge forces at the four finger-pad contact patches (4 corner points each).
// Error (LP solver failure) is distinct from a definite "infeasible" = false.
Result<bool> check_static_equilibrium(const ObjectModel& object, const GripperGeometry& gripper,
                                      const Transform& object_pose, const BimanualGrasp& g,
                                      const Vec3& gravity, double mu, int cone_edges);

}  // namespace bimanip
