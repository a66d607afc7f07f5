#pragma once

#include <string>
#include <vector>

#include "bimanip/collision.hpp"
#include "bimanip/result.hpp"
#include "bimanip/transform.hpp"

namespace bimanip {

struct RevoluteJoint {
    Vec3 axis = Vec3::UnitZ();   // unit vector in the pre-rotation frame
    Transform origin;            // fixed offset from the previous joint frame
    double lo = 0.0;
    double hi = 0.0;
};

// Serial chain of revolute joints with box collision geometry per link.
// link_shapes[0] is attached to the base; link_shapes[i] (i >= 1) to the
// frame after joint i-1. The tool transform maps the flange to the gripper
// frame (approach = +z, sliding = +y, lateral = +x, origin between the
// fingertips).
struct SerialArm {
    std::string name;
    Transform base;
    std::vector<RevoluteJoint> joints;
    std::vector<std::vector<BoxShape>> link_shapes;
    Transform tool;
    std::vector<int> branch_joints;  // joints whose sign labels the IK branch
    VecX home;

    int dof() const { return static_cast<int>(joints.size()); }

    bool within_limits(const VecX& q, double slack = 0.0) const;
    void validate() const;
};

struct JointTrajectory {
    int arm_id = 0;
    std::vector<double> times;
    std::vector<VecX> samples;

    std::size_t size() const { return samples.size(); }
    bool empty() const { return samples.empty(); }
};

inline constexpr double kSingularTol = 1e-4;
inline constexpr int kIndeterminateIkClass = -1;

// Gripper frame in the world. Throws on dimension mismatch or limit violation.
Transform forward_kinematics(const SerialArm& arm, const VecX& q);

// World frames of every body: [base, after joint 0, ..., after joint n-1,
// gripper]. Size dof + 2.
std::vector<Transform> link_frames(const SerialArm& arm, const VecX& q);

// Geometric Jacobian at the gripper frame, rows (angular; linear), world frame.
Mat6X jacobian(const SerialArm& arm, const VecX& q);

double min_singular_value(const SerialArm& arm, const VecX& q);

bool is_singular(const SerialArm& arm, const VecX& q, double tol = kSingularTol);

// Discrete IK-branch label: bit k is the sign of q[branch_joints[k]].
// Configurations within `tol` of a singularity get kIndeterminateIkClass.
int ik_class(const SerialArm& arm, const VecX& q, double tol = kSingularTol);

// Twist taking `current` to `target`: (rotation log; translation delta).
Vec6 pose_error(const Transform& target, const Transform& current);

struct TrackTolerances {
    double pos_tol = 1e-6;
    double rot_tol = 1e-6;
    double singular_tol = kSingularTol;
    int max_newton_iters = 50;
};

// Damped-least-squares Newton step toward `target` starting from q (modified
// in place). Returns the residual error norm pair (rot, pos).
Result<VecX> solve_ik_newton(const SerialArm& arm, const Transform& target, const VecX& seed,
                             const TrackTolerances& tol = {});

// Seed configurations for IK, biased toward the target position. The seeds
// cover both signs of each branch joint so elbow-up and elbow-down solutions
// are both found when they exist.
std::vector<VecX> ik_seed_grid(const SerialArm& arm, const Vec3& target_position, int count = 16);

// IK from a seed grid: first converged, in-limit, non-singular solution wins,
// ties broken by distance to the first seed.
Result<VecX> solve_ik(const SerialArm& arm, const Transform& target, int seed_count = 16);

// Track a sequence of gripper targets with differential IK. targets[0] must
// match forward_kinematics(arm, q0) within 1e-6. Errors carry the failing
// step index.
Result<JointTrajectory> track_targets(const SerialArm& arm, const VecX& q0,
                                      const std::vector<Transform>& targets,
                                      const TrackTolerances& tol = {});

// Track an interpolated pose path discretized into n_steps intervals.
Result<JointTrajectory> differential_ik_track(const SerialArm& arm, const VecX& q0,
                                              const PosePath& path, int n_steps,
                                              const TrackTolerances& tol = {});

// Default step count for a pose path: metric arclength over 0.005.
int default_track_steps(const PosePath& path, const MetricWeights& w);

}  // namespace bimanip
