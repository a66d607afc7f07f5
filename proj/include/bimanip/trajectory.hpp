#pragma once

#include <cstddef>
#include <variant>
#include <vector>

#include "bimanip/grasp.hpp"
#include "bimanip/world.hpp"

namespace bimanip {

// Closed-chain motion: both grippers hold the object with a fixed grasp while
// the object moves. All three sample arrays share one index.
struct TransferSegment {
    BimanualGrasp grasp;
    std::vector<Transform> object_poses;
    JointTrajectory arm1;
    JointTrajectory arm2;
    bool cross_placement = false;  // connects two placement classes

    std::size_t size() const { return object_poses.size(); }
    CompositeConfig config_at(std::size_t i) const {
        return {arm1.samples[i], arm2.samples[i], object_poses[i]};
    }
};

// Arms move freely while the object rests at a fixed stable placement.
struct TransitSegment {
    Transform object_pose;
    JointTrajectory arm1;
    JointTrajectory arm2;

    std::size_t size() const { return arm1.samples.size(); }
    CompositeConfig config_at(std::size_t i) const {
        return {arm1.samples[i], arm2.samples[i], object_pose};
    }
};

using Segment = std::variant<TransferSegment, TransitSegment>;

CompositeConfig segment_start(const Segment& s);
CompositeConfig segment_end(const Segment& s);
std::size_t segment_size(const Segment& s);

struct ManipulationTrajectory {
    std::vector<Segment> segments;

    int transfer_count() const;
    bool empty() const { return segments.empty(); }
    CompositeConfig start_config() const;
    CompositeConfig end_config() const;
};

struct ValidationParams {
    double continuity_tol = 1e-6;
    double chain_tol = 1e-6;   // gripper-object relative-transform drift bound
    bool check_equilibrium = true;
    bool check_placement = false;  // transit samples keep a stable placement
    int subdivide = 1;  // extra interpolated checks between stored samples
};

// Full replay validation: per-sample collision, singularity, equilibrium and
// closed-chain checks, plus boundary continuity between adjacent segments.
// subdivide > 1 also checks interpolated configurations between samples.
// Returns true, or the first violation as an error (never false).
Result<bool> validate_trajectory(const World& w, const ManipulationTrajectory& t,
                                 const ValidationParams& p = {});

// Sum of composite-configuration distances over consecutive samples.
double trajectory_length(const ManipulationTrajectory& t, const MetricWeights& w);

// Largest gripper-object relative-transform drift (rotation angle plus
// translation norm) over a transfer segment, both arms.
double closed_chain_drift(const World& w, const TransferSegment& s);

}  // namespace bimanip
