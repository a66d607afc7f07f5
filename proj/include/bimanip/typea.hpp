#pragma once

#include <vector>

#include "bimanip/reachability.hpp"
#include "bimanip/trajectory.hpp"

namespace bimanip {

// Deterministic stream of bimanual grasp candidates: the enumerated class and
// sliding-axis combinations crossed with sliding offsets from the (2,3)
// Halton sequence. element(j) is a pure function of j.
class GraspEnumeration {
public:
    explicit GraspEnumeration(const World& w);

    std::size_t combo_count() const { return combos_.size(); }
    BimanualGrasp element(std::size_t j) const;

private:
    struct Combo {
        GraspParams g1;  // delta filled per element
        GraspParams g2;
    };
    std::vector<Combo> combos_;
};

struct PlanBudget {
    int max_elements = 512;    // grasp-enumeration elements tried
    int max_rrt_iters = 2000;  // per transit / closed-chain search
    double max_seconds = 600.0;
};

// Shortest lattice path between two coords of one component, A* over the
// 6-connected periodic grid, then greedy line-of-sight shortcutting validated
// against the grid. Endpoints are kept exact.
Result<ObjectPath> plan_object_path(const World& w, const PlacementGrid& grid,
                                    const PlacementCoord& p_start, const PlacementCoord& p_goal);

// True iff the intervals cover [0,1] with pairwise overlap >= overlap_min at
// every junction, so a regrasp configuration exists strictly inside both
// neighbors.
bool check_cover(const std::vector<CoverageInterval>& intervals, double overlap_min = 1e-3);

// Joint-space transit motion for both arms with the object as a static
// obstacle: 5 cm gripper retract, straight-line or bidirectional RRT in the
// combined joint space, then 5 cm approach. Configs must share the object
// pose.
Result<TransitSegment> plan_transit(const World& w, const CompositeConfig& c_from,
                                    const CompositeConfig& c_to, const PlanBudget& budget,
                                    Rng& rng);

// In-placement planner: accumulates coverage intervals from the grasp
// enumeration until the path is covered, then stitches greedy farthest-reach
// transfer segments with transit regrasps at overlap midpoints. The returned
// trajectory's object projection equals sigma.
Result<ManipulationTrajectory> plan_typea(const World& w, const ObjectPath& sigma,
                                          const PlanBudget& budget, Rng& rng);

// Coverage intervals of one enumeration element: one pass per distinct
// jointly valid IK class pair found along the path. Exposed for oracles.
std::vector<CoverageInterval> element_coverage(const World& w, const ObjectPath& sigma,
                                               const BimanualGrasp& g, double ds = 0.005);

}  // namespace bimanip
