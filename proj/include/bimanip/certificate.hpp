#pragma once

#include <cstdint>
#include <vector>

#include "bimanip/reachability.hpp"
#include "bimanip/trajectory.hpp"
#include "bimanip/typea.hpp"
#include "bimanip/typeb.hpp"

namespace bimanip {

// Node of the certificate graph: one connected component of one stable
// placement class's feasible grid.
struct CertificateNode {
    int class_id = 0;
    int component = 0;

    friend bool operator==(const CertificateNode&, const CertificateNode&) = default;
};

// One stored transfer trajectory between two nodes, kept in the a -> b
// direction together with its boundary placements and grasp.
struct CertificateEntry {
    int node_a = 0;
    int node_b = 0;
    PlacementCoord coord_a;
    PlacementCoord coord_b;
    BimanualGrasp grasp;
    ManipulationTrajectory trajectory;
};

struct Certificate {
    std::uint64_t fingerprint = 0;
    std::uint64_t seed = 0;
    std::vector<CertificateNode> nodes;
    std::vector<PlacementGrid> grids;  // indexed by placement class id
    std::vector<CertificateEntry> entries;

    // Node holding the coord, or -1 when it lies in no feasible cell.
    int node_of(const PlacementCoord& p) const;
    // True iff the entry edges connect all nodes (union-find).
    bool spans() const;
};

struct CertificateParams {
    std::uint64_t seed = 0;
    std::uint64_t fingerprint = 0;
    GridResolution grid_res{0.05, 0.05, M_PI / 4.0};
    CCPlanParams cc;
    int shortcut_iters = 200;
    int query_retries = 10;
    double per_pair_seconds = 120.0;
};

struct ManipulationQuery {
    Transform t_start;
    Transform t_goal;
};

// Builds the certificate: feasibility grids for every stable class, one
// attempted transfer per node pair of distinct classes (deterministic per-pair
// seeds, pairs planned concurrently), spanning checked by union-find.
Result<Certificate> compute_certificate(const World& w, const CertificateParams& params);

// Fewest-edge node path from class_s to class_g through the certificate
// graph, ties broken by the lexicographically smallest (class, component)
// sequence. Returns indices into cert.entries, in travel order.
Result<std::vector<int>> extract_placement_sequence(const Certificate& cert, int node_s,
                                                    int node_g);

// Runs a stored trajectory backward (segments and samples reversed).
ManipulationTrajectory reverse_trajectory(const ManipulationTrajectory& t);

// Concatenates trajectories whose boundary composite configurations agree
// within 1e-6; adjacent transit segments are merged. Throws on a mismatched
// junction.
ManipulationTrajectory compose(const std::vector<ManipulationTrajectory>& parts);

// Classifies both query poses, extracts the node sequence, plans in-placement
// legs between certificate edges, and composes everything with connecting
// transit motions.
Result<ManipulationTrajectory> solve_query(const World& w, const Certificate& cert,
                                           const ManipulationQuery& q, const PlanBudget& budget,
                                           Rng& rng);

}  // namespace bimanip
