#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bimanip/grasp.hpp"
#include "bimanip/world.hpp"

namespace bimanip {

// Weight of the theta axis in the in-placement (x, y, theta) metric, m/rad.
inline constexpr double kThetaWeight = 0.1;

// Occupancy lattice over the in-placement coordinates (x, y, theta) of one
// placement class. theta is periodic. A true cell means the placement at the
// cell center is collision-free and graspable by at least one sampled
// bimanual grasp.
struct PlacementGrid {
    int class_id = 0;
    double dx = 0.02;
    double dy = 0.02;
    double dtheta = 0.0;  // 2*pi / ntheta
    int nx = 0;
    int ny = 0;
    int ntheta = 0;
    double x0 = 0.0;  // lower cell-center bound
    double y0 = 0.0;
    std::vector<std::uint8_t> occupancy;  // nx * ny * ntheta
    std::vector<int> component;           // -1 on false cells
    int n_components = 0;

    int index(int ix, int iy, int it) const { return (ix * ny + iy) * ntheta + it; }
    bool occupied(int ix, int iy, int it) const { return occupancy[index(ix, iy, it)] != 0; }
    PlacementCoord cell_center(int ix, int iy, int it) const;
    // Cell containing the coord (theta wrapped); false when (x, y) is out of
    // range.
    bool locate(const PlacementCoord& p, int& ix, int& iy, int& it) const;
    bool contains(const PlacementCoord& p) const;
    int component_at(const PlacementCoord& p) const;  // -1 when not occupied
    std::vector<int> component_sizes() const;
};

struct GridResolution {
    double dx = 0.02;
    double dy = 0.02;
    double dtheta = 5.0 * M_PI / 180.0;
};

// Bimanual grasp candidates tried at each cell: pairs of enumerated grasp
// classes instantiated at the given sliding offsets.
std::vector<BimanualGrasp> grid_grasp_candidates(const World& w,
                                                 const std::vector<double>& delta_samples);

// Marks each lattice cell over surface 0 true iff the placement is
// collision-free and some candidate bimanual grasp validates, then labels
// 6-connected components (theta wraps). Cell evaluations run on all hardware
// threads; the result is independent of the thread count.
PlacementGrid analyze_placement_connectivity(
    const World& w, int class_id, const GridResolution& res = {},
    const std::vector<double>& delta_samples = {0.25, 0.5, 0.75});

// Recomputes the 6-connected component labels (theta wraps) from the
// occupancy lattice. Deterministic scan order.
void label_components(PlacementGrid& grid);

// Flat binary occupancy dump with a one-line text header (dimensions and
// resolution), for offline plotting.
void save_grid(const PlacementGrid& grid, const std::string& path);

// In-placement object path: piecewise-linear in (x, y, theta) with theta
// unwrapped, parameterized over [0,1] proportionally to the metric
// |dx,dy| + kThetaWeight |dtheta|.
class ObjectPath {
public:
    ObjectPath(int class_id, std::vector<Vec3> waypoints);

    int class_id() const { return class_id_; }
    const std::vector<Vec3>& waypoints() const { return waypoints_; }
    double length() const { return knots_.empty() ? 0.0 : knots_.back(); }

    Vec3 coord_at(double t) const;  // raw (x, y, theta), theta unwrapped
    PlacementCoord placement_at(double t) const;
    Transform pose_at(const World& w, double t) const;

private:
    int class_id_;
    std::vector<Vec3> waypoints_;
    std::vector<double> knots_;  // cumulative metric length per waypoint
};

// Maximal parameter range of an object path trackable under one fixed grasp
// and IK class.
struct CoverageInterval {
    BimanualGrasp grasp;
    int ik_class1 = 0;
    int ik_class2 = 0;
    double a = 0.0;
    double b = 0.0;
};

// Scans sigma at parameter resolution ds, tracking the grasp poses with
// damped-least-squares IK continued from the previous step (seeded from
// seed_q1/q2 and pinned to their IK classes). Maximal feasible runs become
// intervals; endpoints are refined by bisection to 1e-4.
std::vector<CoverageInterval> path_grasp_coverage(const World& w, const ObjectPath& sigma,
                                                  const BimanualGrasp& g, const VecX& seed_q1,
                                                  const VecX& seed_q2, double ds = 0.005);

}  // namespace bimanip
