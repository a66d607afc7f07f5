#pragma once

#include <optional>

#include "bimanip/trajectory.hpp"

namespace bimanip {

// Transfer query between two placement classes: object poses, the shared
// grasp, and IK solutions at both ends.
struct ClosedChainQuery {
    Transform t_start;
    Transform t_goal;
    BimanualGrasp grasp;
    VecX q1_start, q2_start;
    VecX q1_goal, q2_goal;
    int class_start = 0;
    int class_goal = 0;
    PlacementCoord coord_start;
    PlacementCoord coord_goal;
};

struct CCPlanParams {
    double step_size = 0.15;  // object-part metric
    int k_nn = 5;
    Aabb bounds{Vec3::Zero(), Vec3::Zero()};  // zero extent: derive from the world
    int max_iters = 2000;
    bool check_equilibrium = true;
};

// Translation sampling box: surface footprint inflated by the object
// diameter.
Aabb default_cc_bounds(const World& w);

// Stages a flip between class_i and class_j at the manipulation point: the
// start orientation puts the goal face's outward normal over the line
// perpendicular to the base-to-base axis, the goal pose is the flip of the
// start about that axis, and a common grasp with IK at both ends is sampled.
Result<ClosedChainQuery> generate_cc_query(const World& w, int class_i, int class_j,
                                           const Vec2& manipulation_point, Rng& rng);

// Bidirectional RRT over object poses with both grippers tracking the fixed
// grasp. Returns a single-transfer-segment trajectory, or nothing when the
// iteration budget runs out.
std::optional<ManipulationTrajectory> cc_plan(const World& w, const ClosedChainQuery& query,
                                              const CCPlanParams& params, Rng& rng);

// Random-pair shortcutting of a closed-chain trajectory: a direct interpolant
// replaces a subpath only when it tracks validly and strictly shortens the
// composite-metric length.
ManipulationTrajectory shortcut_cc(const World& w, const ManipulationTrajectory& traj,
                                   int iterations, Rng& rng);

}  // namespace bimanip
