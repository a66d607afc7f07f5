#include "bimanip/reachability.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>

#include "bimanip/parallel.hpp"

namespace bimanip {

namespace {

double wrap_theta(double t) {
    t = std::fmod(t, 2.0 * M_PI);
    return t < 0.0 ? t + 2.0 * M_PI : t;
}

// Conservative base-to-gripper reach bound.
double arm_reach(const SerialArm& arm) {
    double r = arm.tool.translation.norm();
    for (const RevoluteJoint& j : arm.joints) r += j.origin.translation.norm();
    return r;
}

// Static boxes the grippers must avoid regardless of arm configuration.
std::vector<Obb> static_obbs(const World& w) {
    std::vector<Obb> out;
    for (const BoxShape& o : w.obstacles) out.push_back(make_obb(Transform::identity(), o));
    for (const SupportSurface& s : w.surfaces) out.push_back(make_obb(s.frame, s.slab()));
    return out;
}

bool any_overlap(const std::vector<Obb>& a, const std::vector<Obb>& b) {
    for (const Obb& x : a)
        for (const Obb& y : b)
            if (obb_overlap(x, y)) return true;
    return false;
}

// Per-arm grasp candidate realized at a concrete sliding offset.
struct ArmCandidate {
    GraspParams grasp;
};

std::vector<ArmCandidate> arm_candidates(const World& w, int arm,
                                         const std::vector<double>& delta_samples) {
    const double mid = delta_samples[delta_samples.size() / 2];
    std::vector<ArmCandidate> out;
    for (const GraspClassId& c : enumerate_grasp_classes(w.object, w.gripper)) {
        if (c.arm != arm) continue;
        for (int b = 1; b <= 6; ++b) {
            if (!grasp_fits(w.object, w.gripper, c.link, c.approach, b)) continue;
            // Negative sliding codes mirror positive ones up to a half-turn of
            // the wrist; one offset sample keeps that orientation available
            // without tripling the candidate count.
            const bool mirrored = b > 3;
            for (double d : delta_samples) {
                if (mirrored && d != mid) continue;
                out.push_back({GraspParams{c.link, c.approach, b, d, 0.0}});
            }
        }
    }
    return out;
}

// IK solutions for one arm's grasp candidate at a fixed object pose, with the
// gripper pre-screened against the static environment.
struct ArmCandidateState {
    Transform gripper_pose;
    std::vector<Obb> obbs;
    bool statically_blocked = false;
    std::optional<std::vector<VecX>> ik;  // computed lazily
};

std::vector<VecX> candidate_ik(const SerialArm& arm, const Transform& target, double reach) {
    std::vector<VecX> sols;
    if ((target.translation - arm.base.translation).norm() > reach) return sols;
    // The grid probe only needs a branch or two; a tighter iteration cap keeps
    // hopeless seeds cheap.
    TrackTolerances tol;
    tol.max_newton_iters = 30;
    for (const VecX& seed : ik_seed_grid(arm, target.translation, 16)) {
        Result<VecX> r = solve_ik_newton(arm, target, seed, tol);
        if (!r.ok()) continue;
        const VecX& q = r.value();
        if (!arm.within_limits(q) || is_singular(arm, q)) continue;
        bool dup = false;
        for (const VecX& s : sols)
            if ((s - q).lpNorm<Eigen::Infinity>() < 1e-6) dup = true;
        if (!dup) sols.push_back(q);
    }
    return sols;
}

// Per-arm candidate lists plus index pairs, opposed approach axes first.
struct CandidatePairs {
    std::vector<ArmCandidate> c1;
    std::vector<ArmCandidate> c2;
    std::vector<std::pair<int, int>> pairs;
};

CandidatePairs candidate_pairs(const World& w, const std::vector<double>& delta_samples) {
    CandidatePairs out;
    out.c1 = arm_candidates(w, 0, delta_samples);
    out.c2 = arm_candidates(w, 1, delta_samples);
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < static_cast<int>(out.c1.size()); ++i) {
            for (int j = 0; j < static_cast<int>(out.c2.size()); ++j) {
                const GraspParams& a = out.c1[i].grasp;
                const GraspParams& b = out.c2[j].grasp;
                if (a.link == b.link && a.approach == b.approach) continue;
                const bool opposed =
                    a.link == b.link && (a.approach - 1) % 3 == (b.approach - 1) % 3;
                if (opposed == (pass == 0)) out.pairs.emplace_back(i, j);
            }
        }
    }
    return out;
}

}  // namespace

PlacementCoord PlacementGrid::cell_center(int ix, int iy, int it) const {
    return {class_id, x0 + ix * dx, y0 + iy * dy, it * dtheta};
}

bool PlacementGrid::locate(const PlacementCoord& p, int& ix, int& iy, int& it) const {
    ix = static_cast<int>(std::lround((p.x - x0) / dx));
    iy = static_cast<int>(std::lround((p.y - y0) / dy));
    it = static_cast<int>(std::lround(wrap_theta(p.theta) / dtheta)) % ntheta;
    return ix >= 0 && ix < nx && iy >= 0 && iy < ny;
}

bool PlacementGrid::contains(const PlacementCoord& p) const {
    int ix = 0, iy = 0, it = 0;
    return p.class_id == class_id && locate(p, ix, iy, it) && occupied(ix, iy, it);
}

int PlacementGrid::component_at(const PlacementCoord& p) const {
    int ix = 0, iy = 0, it = 0;
    if (p.class_id != class_id || !locate(p, ix, iy, it)) return -1;
    return component[index(ix, iy, it)];
}

std::vector<int> PlacementGrid::component_sizes() const {
    std::vector<int> sizes(n_components, 0);
    for (int c : component)
        if (c >= 0) ++sizes[c];
    return sizes;
}

std::vector<BimanualGrasp> grid_grasp_candidates(const World& w,
                                                 const std::vector<double>& delta_samples) {
    const CandidatePairs cp = candidate_pairs(w, delta_samples);
    std::vector<BimanualGrasp> out;
    out.reserve(cp.pairs.size());
    for (const auto& [i, j] : cp.pairs) out.push_back({cp.c1[i].grasp, cp.c2[j].grasp});
    return out;
}

PlacementGrid analyze_placement_connectivity(const World& w, int class_id,
                                             const GridResolution& res,
                                             const std::vector<double>& delta_samples) {
    if (res.dx <= 0 || res.dy <= 0 || res.dtheta <= 0)
        throw std::invalid_argument("analyze_placement_connectivity: nonpositive resolution");
    if (w.surfaces.empty()) throw std::invalid_argument("world has no support surface");
    const SupportSurface& surf = w.surfaces[0];

    PlacementGrid grid;
    grid.class_id = class_id;
    grid.dx = res.dx;
    grid.dy = res.dy;
    grid.ntheta = std::max(1, static_cast<int>(std::lround(2.0 * M_PI / res.dtheta)));
    grid.dtheta = 2.0 * M_PI / grid.ntheta;
    grid.nx = 2 * static_cast<int>(std::floor(surf.half_extents[0] / res.dx)) + 1;
    grid.ny = 2 * static_cast<int>(std::floor(surf.half_extents[1] / res.dy)) + 1;
    grid.x0 = -res.dx * (grid.nx - 1) / 2.0;
    grid.y0 = -res.dy * (grid.ny - 1) / 2.0;
    grid.occupancy.assign(static_cast<std::size_t>(grid.nx) * grid.ny * grid.ntheta, 0);

    const CandidatePairs cp = candidate_pairs(w, delta_samples);
    const std::vector<Obb> statics = static_obbs(w);
    const double reach1 = arm_reach(w.arms[0]);
    const double reach2 = arm_reach(w.arms[1]);

    const int n_xy = grid.nx * grid.ny;
    parallel_for(n_xy, [&](int xy) {
        const int ix = xy / grid.ny;
        const int iy = xy % grid.ny;
        // Per-column warm start: neighboring theta cells usually share a
        // working grasp.
        int warm = -1;
        std::vector<ArmCandidateState> states1(cp.c1.size());
        std::vector<ArmCandidateState> states2(cp.c2.size());
        std::vector<char> fresh1(cp.c1.size());
        std::vector<char> fresh2(cp.c2.size());
        for (int it = 0; it < grid.ntheta; ++it) {
            const PlacementCoord coord = grid.cell_center(ix, iy, it);
            const Transform pose = placement_to_transform(w, coord);
            if (!object_collision_free(w, pose)) continue;

            // Per-arm state is shared across every pair the candidate joins.
            std::fill(fresh1.begin(), fresh1.end(), 0);
            std::fill(fresh2.begin(), fresh2.end(), 0);
            auto state = [&](int arm, int idx) -> ArmCandidateState& {
                ArmCandidateState& s = arm == 0 ? states1[idx] : states2[idx];
                char& ready = arm == 0 ? fresh1[idx] : fresh2[idx];
                if (!ready) {
                    ready = 1;
                    const GraspParams& g = arm == 0 ? cp.c1[idx].grasp : cp.c2[idx].grasp;
                    s.gripper_pose = grasp_to_gripper_pose(pose, g, w.object, w.gripper);
                    s.obbs = gripper_obbs_at(s.gripper_pose, w.gripper);
                    s.statically_blocked = any_overlap(s.obbs, statics);
                    s.ik.reset();
                }
                return s;
            };

            auto try_grasp = [&](int pi) -> bool {
                const auto [i, j] = cp.pairs[pi];
                ArmCandidateState& s1 = state(0, i);
                if (s1.statically_blocked) return false;
                ArmCandidateState& s2 = state(1, j);
                if (s2.statically_blocked) return false;
                if (any_overlap(s1.obbs, s2.obbs)) return false;
                if (!s1.ik) s1.ik = candidate_ik(w.arms[0], s1.gripper_pose, reach1);
                if (s1.ik->empty()) return false;
                if (!s2.ik) s2.ik = candidate_ik(w.arms[1], s2.gripper_pose, reach2);
                if (s2.ik->empty()) return false;
                for (const VecX& q1 : *s1.ik)
                    for (const VecX& q2 : *s2.ik)
                        if (check_collision_free(w, {q1, q2, pose}, true)) return true;
                return false;
            };

            bool graspable = false;
            if (warm >= 0 && try_grasp(warm)) graspable = true;
            for (int pi = 0; !graspable && pi < static_cast<int>(cp.pairs.size()); ++pi) {
                if (pi == warm) continue;
                if (try_grasp(pi)) {
                    warm = pi;
                    graspable = true;
                }
            }
            if (graspable) grid.occupancy[grid.index(ix, iy, it)] = 1;
        }
    });

    label_components(grid);
    return grid;
}

void label_components(PlacementGrid& grid) {
    grid.component.assign(grid.occupancy.size(), -1);
    grid.n_components = 0;
    std::deque<std::array<int, 3>> queue;
    for (int ix = 0; ix < grid.nx; ++ix) {
        for (int iy = 0; iy < grid.ny; ++iy) {
            for (int it = 0; it < grid.ntheta; ++it) {
                const int idx = grid.index(ix, iy, it);
                if (!grid.occupancy[idx] || grid.component[idx] >= 0) continue;
                const int label = grid.n_components++;
                grid.component[idx] = label;
                queue.push_back({ix, iy, it});
                while (!queue.empty()) {
                    const auto [cx, cy, ct] = queue.front();
                    queue.pop_front();
                    const int moves[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                             {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
                    for (const auto& m : moves) {
                        const int nx2 = cx + m[0];
                        const int ny2 = cy + m[1];
                        int nt = ct + m[2];
                        if (nx2 < 0 || nx2 >= grid.nx || ny2 < 0 || ny2 >= grid.ny) continue;
                        nt = (nt + grid.ntheta) % grid.ntheta;
                        const int nidx = grid.index(nx2, ny2, nt);
                        if (!grid.occupancy[nidx] || grid.component[nidx] >= 0) continue;
                        grid.component[nidx] = label;
                        queue.push_back({nx2, ny2, nt});
                    }
                }
            }
        }
    }
}

void save_grid(const PlacementGrid& grid, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        char header[256];
        std::snprintf(header, sizeof(header),
                      "placement-grid v1 class=%d nx=%d ny=%d ntheta=%d dx=%.17g dy=%.17g "
                      "dtheta=%.17g x0=%.17g y0=%.17g\n",
                      grid.class_id, grid.nx, grid.ny, grid.ntheta, grid.dx, grid.dy,
                      grid.dtheta, grid.x0, grid.y0);
        out << header;
        out.write(reinterpret_cast<const char*>(grid.occupancy.data()),
                  static_cast<std::streamsize>(grid.occupancy.size()));
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error("cannot rename " + tmp);
}

ObjectPath::ObjectPath(int class_id, std::vector<Vec3> waypoints)
    : class_id_(class_id), waypoints_(std::move(waypoints)) {
    if (waypoints_.empty()) throw std::invalid_argument("ObjectPath: no waypoints");
    knots_.resize(waypoints_.size());
    knots_[0] = 0.0;
    for (std::size_t i = 1; i < waypoints_.size(); ++i) {
        const Vec3 d = waypoints_[i] - waypoints_[i - 1];
        knots_[i] = knots_[i - 1] + std::hypot(d[0], d[1]) + kThetaWeight * std::abs(d[2]);
    }
}

Vec3 ObjectPath::coord_at(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const double total = knots_.back();
    if (total <= 0.0) return waypoints_.front();
    const double s = t * total;
    std::size_t i = 1;
    while (i + 1 < knots_.size() && knots_[i] < s) ++i;
    const double seg = knots_[i] - knots_[i - 1];
    const double u = seg > 0.0 ? (s - knots_[i - 1]) / seg : 0.0;
    return waypoints_[i - 1] + std::clamp(u, 0.0, 1.0) * (waypoints_[i] - waypoints_[i - 1]);
}

PlacementCoord ObjectPath::placement_at(double t) const {
    const Vec3 c = coord_at(t);
    return {class_id_, c[0], c[1], wrap_theta(c[2])};
}

Transform ObjectPath::pose_at(const World& w, double t) const {
    return placement_to_transform(w, placement_at(t));
}

namespace {

// One feasibility probe of the coverage scan; continues the joint state.
bool coverage_step(const World& w, const ObjectPath& sigma, const BimanualGrasp& g, double t,
                   int class1, int class2, const VecX& seed_q1, const VecX& seed_q2, VecX& q1,
                   VecX& q2) {
    const Transform pose = sigma.pose_at(w, t);
    const Transform t1 = grasp_to_gripper_pose(pose, g.g1, w.object, w.gripper);
    const Transform t2 = grasp_to_gripper_pose(pose, g.g2, w.object, w.gripper);

    auto solve_arm = [&](const SerialArm& arm, const Transform& target, const VecX& seed,
                         int want_class, VecX& q) {
        Result<VecX> r = solve_ik_newton(arm, target, q);
        if (!r.ok() || !arm.within_limits(r.value()) || is_singular(arm, r.value()) ||
            ik_class(arm, r.value()) != want_class) {
            r = solve_ik_newton(arm, target, seed);
            if (!r.ok() || !arm.within_limits(r.value()) || is_singular(arm, r.value()) ||
                ik_class(arm, r.value()) != want_class)
                return false;
        }
        q = r.value();
        return true;
    };

    VecX n1 = q1, n2 = q2;
    if (!solve_arm(w.arms[0], t1, seed_q1, class1, n1)) return false;
    if (!solve_arm(w.arms[1], t2, seed_q2, class2, n2)) return false;
    if (!check_collision_free(w, {n1, n2, pose}, true)) return false;
    Result<bool> eq = check_static_equilibrium(w.object, w.gripper, pose, g, w.gravity,
                                               w.friction, w.cone_edges);
    if (!eq.ok() || !eq.value()) return false;
    q1 = n1;
    q2 = n2;
    return true;
}

}  // namespace

std::vector<CoverageInterval> path_grasp_coverage(const World& w, const ObjectPath& sigma,
                                                  const BimanualGrasp& g, const VecX& seed_q1,
                                                  const VecX& seed_q2, double ds) {
    if (ds <= 0.0) throw std::invalid_argument("path_grasp_coverage: nonpositive ds");
    const int class1 = ik_class(w.arms[0], seed_q1);
    const int class2 = ik_class(w.arms[1], seed_q2);
    std::vector<CoverageInterval> out;
    if (class1 == kIndeterminateIkClass || class2 == kIndeterminateIkClass) return out;

    const int n = std::max(1, static_cast<int>(std::ceil(1.0 / ds)));
    VecX q1 = seed_q1, q2 = seed_q2;

    auto probe = [&](double t, VecX& a, VecX& b) {
        return coverage_step(w, sigma, g, t, class1, class2, seed_q1, seed_q2, a, b);
    };

    // Bisection of the feasibility boundary in (lo, hi), feasible at `lo`
    // side iff lo_feasible; returns the refined boundary on the feasible side.
    auto refine = [&](double feas, double infeas, VecX a, VecX b) {
        while (std::abs(infeas - feas) > 1e-4) {
            const double mid = 0.5 * (feas + infeas);
            VecX ma = a, mb = b;
            if (probe(mid, ma, mb)) {
                feas = mid;
                a = ma;
                b = mb;
            } else {
                infeas = mid;
            }
        }
        return feas;
    };

    bool in_run = false;
    double run_start = 0.0;
    double prev_t = 0.0;
    VecX run_q1, run_q2;  // configs at the last feasible sample
    for (int k = 0; k <= n; ++k) {
        const double t = std::min(1.0, k * ds);
        const bool ok = probe(t, q1, q2);
        if (ok && !in_run) {
            in_run = true;
            run_start = k == 0 ? 0.0 : refine(t, prev_t, q1, q2);
        } else if (!ok && in_run) {
            const double end = refine(prev_t, t, run_q1, run_q2);
            if (end > run_start) out.push_back({g, class1, class2, run_start, end});
            in_run = false;
        }
        if (ok) {
            run_q1 = q1;
            run_q2 = q2;
        }
        prev_t = t;
    }
    if (in_run && 1.0 > run_start) out.push_back({g, class1, class2, run_start, 1.0});
    return out;
}

}  // namespace bimanip
