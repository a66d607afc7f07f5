#include "bimanip/typeb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>

namespace bimanip {

namespace {

const TrackTolerances kTightTol{1e-9, 1e-9, kSingularTol, 100};

constexpr double kCcTrackRes = 0.01;   // object-metric tracking resolution
constexpr double kJunctionTol = 1e-6;  // joint agreement when trees meet

struct CCSample {
    Transform pose;
    VecX q1;
    VecX q2;
};

double dist_obj(const Transform& a, const Transform& b, const MetricWeights& w) {
    return object_distance(a, b, w);
}

bool cc_state_valid(const World& w, const VecX& q1, const VecX& q2, const Transform& pose,
                    const BimanualGrasp& g, bool check_eq) {
    if (!w.arms[0].within_limits(q1) || !w.arms[1].within_limits(q2)) return false;
    if (is_singular(w.arms[0], q1) || is_singular(w.arms[1], q2)) return false;
    if (!check_collision_free(w, {q1, q2, pose}, true)) return false;
    if (check_eq) {
        Result<bool> eq = check_static_equilibrium(w.object, w.gripper, pose, g, w.gravity,
                                                   w.friction, w.cone_edges);
        if (!eq.ok() || !eq.value()) return false;
    }
    return true;
}

// Tracks the pose path a -> b under the fixed grasp; returns the samples
// after the start state, or nothing when any step fails.
std::optional<std::vector<CCSample>> track_cc(const World& w, const BimanualGrasp& g,
                                              const Transform& a, const Transform& b, VecX q1,
                                              VecX q2, bool check_eq) {
    const double d = dist_obj(a, b, w.metric);
    const int n = std::max(2, static_cast<int>(std::ceil(d / kCcTrackRes)));
    PosePath path(a, b);
    std::vector<CCSample> out;
    out.reserve(n);
    for (int i = 1; i <= n; ++i) {
        const Transform pose = path.at(static_cast<double>(i) / n);
        const Transform t1 = grasp_to_gripper_pose(pose, g.g1, w.object, w.gripper);
        const Transform t2 = grasp_to_gripper_pose(pose, g.g2, w.object, w.gripper);
        Result<VecX> r1 = solve_ik_newton(w.arms[0], t1, q1, kTightTol);
        if (!r1.ok()) return std::nullopt;
        Result<VecX> r2 = solve_ik_newton(w.arms[1], t2, q2, kTightTol);
        if (!r2.ok()) return std::nullopt;
        q1 = r1.value();
        q2 = r2.value();
        if (!cc_state_valid(w, q1, q2, pose, g, check_eq)) return std::nullopt;
        out.push_back({pose, q1, q2});
    }
    return out;
}

std::vector<VecX> cc_ik_solutions(const SerialArm& arm, const Transform& target) {
    std::vector<VecX> sols;
    for (const VecX& seed : ik_seed_grid(arm, target.translation, 16)) {
        Result<VecX> r = solve_ik_newton(arm, target, seed, kTightTol);
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

// Lift height that clears the highest support surface below both endpoint
// poses: rotating in place can dip a corner by half the object diameter below
// the center, so the center must rise until that corner clears the surface.
// A small floor keeps the lift meaningful even with generous clearance.
double clearance_lift(const World& w, const Transform& a, const Transform& b, double diam) {
    const double zmin = std::min(a.translation[2], b.translation[2]);
    double top = -std::numeric_limits<double>::infinity();
    for (const auto& s : w.surfaces) {
        const double t = s.frame.translation[2];
        if (t <= zmin + 1e-9) top = std::max(top, t);
    }
    if (!std::isfinite(top)) return 0.02;
    return std::max(0.02, 0.5 * diam + 0.01 - (zmin - top));
}

}  // namespace

Aabb default_cc_bounds(const World& w) {
    const SupportSurface& s = w.surfaces[0];
    double diam = 0.0;
    for (const Vec3& v : w.object.vertices()) diam = std::max(diam, 2.0 * v.norm());
    const Vec3 c = s.frame.translation;
    return {c - Vec3(s.half_extents[0] + diam, s.half_extents[1] + diam, 0.0),
            c + Vec3(s.half_extents[0] + diam, s.half_extents[1] + diam, std::max(diam, 0.05))};
}

Result<ClosedChainQuery> generate_cc_query(const World& w, int class_i, int class_j,
                                           const Vec2& manipulation_point, Rng& rng) {
    if (class_i == class_j)
        throw std::invalid_argument("generate_cc_query: classes must be distinct");
    const SupportSurface& surf = w.surfaces[0];
    const PlacementClass& pj = w.placement(class_j);

    // Base-to-base axis (horizontal) and its in-plane perpendicular.
    Vec3 u_r = w.arms[1].base.translation - w.arms[0].base.translation;
    u_r[2] = 0.0;
    if (u_r.norm() < 1e-9) u_r = Vec3::UnitX();
    u_r.normalize();
    const Vec3 u_c = Vec3::UnitZ().cross(u_r);

    // Start orientation: the goal face's outward normal projects onto u_c, so
    // the flip axis is u_r.
    const Transform pose0 =
        placement_to_transform(w, {class_i, manipulation_point[0], manipulation_point[1], 0.0});
    const Vec3 v0 = pose0.rotation * pj.normal;
    const Vec2 h0(v0.dot(Vec3::UnitX()), v0.dot(Vec3::UnitY()));
    double theta = 0.0;
    if (h0.norm() > 1e-9)
        theta = std::atan2(u_c[1], u_c[0]) - std::atan2(h0[1], h0[0]);
    if (theta < 0.0) theta += 2.0 * M_PI;
    const Transform t_start = placement_to_transform(
        w, {class_i, manipulation_point[0], manipulation_point[1], theta});

    // Flip about u_r through the manipulation point, taking the goal face's
    // normal to straight down.
    const Vec3 v = t_start.rotation * pj.normal;
    const Vec3 down = -Vec3::UnitZ();
    const double chi = std::atan2(v.cross(down).dot(u_r), v.dot(down));
    const Rotation r_flip = Rotation::axis_angle(u_r, chi);
    const Vec3 pivot = surf.frame * Vec3(manipulation_point[0], manipulation_point[1], 0.0);
    Transform t_goal{r_flip * t_start.rotation,
                     r_flip * (t_start.translation - pivot) + pivot};
    t_goal.translation[2] = pivot[2] + pj.offset;

    Result<PlacementCoord> cs = classify_placement(w, t_start);
    if (!cs.ok()) return cs.error();
    Result<PlacementCoord> cg = classify_placement(w, t_goal);
    if (!cg.ok()) return cg.error();
    if (cs.value().class_id != class_i || cg.value().class_id != class_j)
        return Error{ErrorCode::kTilted, "flip construction landed on the wrong face"};

    // Candidate grasps shared by both poses.
    std::vector<std::pair<GraspParams, GraspParams>> combos;
    {
        std::vector<GraspParams> per_arm[2];
        for (const GraspClassId& c : enumerate_grasp_classes(w.object, w.gripper))
            for (int b = 1; b <= 6; ++b)
                if (grasp_fits(w.object, w.gripper, c.link, c.approach, b))
                    per_arm[c.arm].push_back({c.link, c.approach, b, 0.5, 0.0});
        for (const GraspParams& a : per_arm[0])
            for (const GraspParams& b : per_arm[1])
                if (!(a.link == b.link && a.approach == b.approach)) combos.emplace_back(a, b);
    }
    if (combos.empty()) return Error{ErrorCode::kNoCommonGrasp, "object admits no grasp pair"};

    // Endpoint validity does not imply the grasp survives the swing, so
    // candidates are screened by tracking the lift, swing and set-down legs
    // under the closed-chain constraint. A passing screen also yields the
    // goal-side configurations, so the returned query is connected by
    // construction.
    double diam = 0.0;
    for (const Vec3& vv : w.object.vertices()) diam = std::max(diam, 2.0 * vv.norm());
    const double lift = clearance_lift(w, t_start, t_goal, diam);
    auto flip_screen = [&](const BimanualGrasp& g, const VecX& a1, const VecX& a2, VecX& b1,
                           VecX& b2) {
        Transform up_s = t_start;
        up_s.translation[2] += lift;
        Transform up_g = t_goal;
        up_g.translation[2] += lift;
        const Transform legs[3][2] = {{t_start, up_s}, {up_s, up_g}, {up_g, t_goal}};
        VecX q1 = a1, q2 = a2;
        for (const auto& leg : legs) {
            auto edge = track_cc(w, g, leg[0], leg[1], q1, q2, true);
            if (!edge) return false;
            q1 = edge->back().q1;
            q2 = edge->back().q2;
        }
        b1 = q1;
        b2 = q2;
        return true;
    };

    const double tilts[3] = {0.0, M_PI / 6.0, -M_PI / 6.0};
    int c_eq = 0, c_s1 = 0, c_s2 = 0, c_e1 = 0, c_e2 = 0, c_col = 0, c_scr = 0;  // TEMP DEBUG
    for (int attempt = 0; attempt < 200; ++attempt) {
        auto [g1, g2] = combos[rng.uniform_int(combos.size())];
        g1.delta = rng.uniform(0.15, 0.85);
        g2.delta = rng.uniform(0.15, 0.85);
        for (double tilt : tilts) {
            g1.tilt = tilt;
            g2.tilt = tilt;
            const BimanualGrasp g{g1, g2};

            Result<bool> eq_s = check_static_equilibrium(w.object, w.gripper, t_start, g,
                                                         w.gravity, w.friction, w.cone_edges);
            if (!eq_s.ok() || !eq_s.value()) { ++c_eq; continue; }

            const auto s1 = cc_ik_solutions(
                w.arms[0], grasp_to_gripper_pose(t_start, g.g1, w.object, w.gripper));
            if (s1.empty()) { ++c_s1; continue; }
            const auto s2 = cc_ik_solutions(
                w.arms[1], grasp_to_gripper_pose(t_start, g.g2, w.object, w.gripper));
            if (s2.empty()) { ++c_s2; continue; }
            const auto e1 = cc_ik_solutions(
                w.arms[0], grasp_to_gripper_pose(t_goal, g.g1, w.object, w.gripper));
            if (e1.empty()) { ++c_e1; continue; }
            const auto e2 = cc_ik_solutions(
                w.arms[1], grasp_to_gripper_pose(t_goal, g.g2, w.object, w.gripper));
            if (e2.empty()) { ++c_e2; continue; }

            // The tracked goal branch is pinned by continuation, but a grasp
            // whose every goal-side pair collides can never pass the screen,
            // so prune it before paying for tracking.
            bool goal_clear = false;
            for (const VecX& b1 : e1) {
                for (const VecX& b2 : e2)
                    if (check_collision_free(w, {b1, b2, t_goal}, true)) {
                        goal_clear = true;
                        break;
                    }
                if (goal_clear) break;
            }
            if (!goal_clear) { ++c_col; continue; }

            // Screen collision-free start pairs along the flip profile; the
            // first pair that survives fixes the goal configurations too.
            ClosedChainQuery q;
            bool found = false;
            int screened = 0;
            for (const VecX& a1 : s1) {
                for (const VecX& a2 : s2) {
                    if (!check_collision_free(w, {a1, a2, t_start}, true)) continue;
                    VecX b1, b2;
                    if (flip_screen(g, a1, a2, b1, b2)) {
                        q.q1_start = a1;
                        q.q2_start = a2;
                        q.q1_goal = b1;
                        q.q2_goal = b2;
                        found = true;
                        break;
                    }
                    // The tracking screen is expensive; cap it per grasp.
                    if (++screened >= 4) break;
                }
                if (found || screened >= 4) break;
            }
            if (!found) { ++c_scr; continue; }
            q.t_start = t_start;
            q.t_goal = t_goal;
            q.grasp = g;
            q.class_start = class_i;
            q.class_goal = class_j;
            q.coord_start = cs.value();
            q.coord_goal = cg.value();
            return q;
        }
    }
    if (std::getenv("CC_DEBUG") != nullptr)
        std::fprintf(stderr, "ccq: eq=%d s1=%d s2=%d e1=%d e2=%d col=%d screen=%d\n", c_eq, c_s1,
                     c_s2, c_e1, c_e2, c_col, c_scr);
    return Error{ErrorCode::kNoCommonGrasp,
                 "no grasp validates at both endpoint poses within the attempt budget"};
}

namespace {

struct CCVertex {
    Transform pose;
    VecX q1;
    VecX q2;
    int parent = -1;
    std::vector<CCSample> edge;  // samples from parent to this vertex
};

using CCTreeVec = std::vector<CCVertex>;

// Extension target at most step_size from `from` (the pose-path parameter is
// not metric-proportional, so the clip parameter is found by bisection).
Transform clip_pose(const Transform& from, const Transform& to, double step,
                    const MetricWeights& m) {
    const double d = dist_obj(from, to, m);
    if (d <= step) return to;
    PosePath path(from, to);
    double lo = 0.0, hi = 1.0;
    for (int i = 0; i < 30; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (dist_obj(from, path.at(mid), m) > step)
            hi = mid;
        else
            lo = mid;
    }
    return path.at(lo);
}

int cc_extend(const World& w, const BimanualGrasp& g, CCTreeVec& tree, const Transform& target,
              const CCPlanParams& p) {
    // k nearest vertices by the object-part metric, nearest first.
    std::vector<std::pair<double, int>> order;
    order.reserve(tree.size());
    for (std::size_t i = 0; i < tree.size(); ++i)
        order.emplace_back(dist_obj(tree[i].pose, target, w.metric), static_cast<int>(i));
    const std::size_t k = std::min<std::size_t>(p.k_nn, order.size());
    std::partial_sort(order.begin(), order.begin() + k, order.end());
    for (std::size_t i = 0; i < k; ++i) {
        const CCVertex& v = tree[order[i].second];
        if (order[i].first < 1e-12) continue;
        const Transform stepped = clip_pose(v.pose, target, p.step_size, w.metric);
        auto edge = track_cc(w, g, v.pose, stepped, v.q1, v.q2, p.check_equilibrium);
        if (!edge) continue;
        CCVertex nv;
        nv.pose = edge->back().pose;
        nv.q1 = edge->back().q1;
        nv.q2 = edge->back().q2;
        nv.parent = order[i].second;
        nv.edge = std::move(*edge);
        tree.push_back(std::move(nv));
        return static_cast<int>(tree.size()) - 1;
    }
    return -1;
}

// Polished joint state at an exact pose; used to match configurations when
// the two trees meet.
bool cc_polish(const World& w, const BimanualGrasp& g, const Transform& pose, VecX& q1,
               VecX& q2) {
    const TrackTolerances ultra{1e-12, 1e-12, kSingularTol, 200};
    Result<VecX> r1 =
        solve_ik_newton(w.arms[0], grasp_to_gripper_pose(pose, g.g1, w.object, w.gripper), q1,
                        ultra);
    Result<VecX> r2 =
        solve_ik_newton(w.arms[1], grasp_to_gripper_pose(pose, g.g2, w.object, w.gripper), q2,
                        ultra);
    if (!r1.ok() || !r2.ok()) return false;
    q1 = r1.value();
    q2 = r2.value();
    return true;
}

}  // namespace

std::optional<ManipulationTrajectory> cc_plan(const World& w, const ClosedChainQuery& query,
                                              const CCPlanParams& params, Rng& rng) {
    CCPlanParams p = params;
    if ((p.bounds.hi - p.bounds.lo).norm() < 1e-12) p.bounds = default_cc_bounds(w);

    auto make_segment = [&](std::vector<CCSample> samples) {
        TransferSegment seg;
        seg.grasp = query.grasp;
        seg.cross_placement = true;
        seg.arm1.arm_id = 0;
        seg.arm2.arm_id = 1;
        const std::size_t n = samples.size();
        for (std::size_t i = 0; i < n; ++i) {
            seg.object_poses.push_back(samples[i].pose);
            seg.arm1.samples.push_back(samples[i].q1);
            seg.arm2.samples.push_back(samples[i].q2);
            const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
            seg.arm1.times.push_back(t);
            seg.arm2.times.push_back(t);
        }
        ManipulationTrajectory traj;
        traj.segments.emplace_back(std::move(seg));
        return traj;
    };

    if (dist_obj(query.t_start, query.t_goal, w.metric) < 1e-12 &&
        (query.q1_start - query.q1_goal).lpNorm<Eigen::Infinity>() < 1e-9 &&
        (query.q2_start - query.q2_goal).lpNorm<Eigen::Infinity>() < 1e-9)
        return make_segment({{query.t_start, query.q1_start, query.q2_start}});

    double diam = 0.0;
    for (const Vec3& v : w.object.vertices()) diam = std::max(diam, 2.0 * v.norm());
    const double lift = clearance_lift(w, query.t_start, query.t_goal, diam);

    // A transfer between placements is physically a lift, a swing to the goal
    // orientation at height, and a set-down. Try that deterministic profile
    // before spending search iterations.
    {
        Transform up_s = query.t_start;
        up_s.translation[2] = std::min(up_s.translation[2] + lift, p.bounds.hi[2]);
        Transform up_g = query.t_goal;
        up_g.translation[2] = std::min(up_g.translation[2] + lift, p.bounds.hi[2]);
        std::vector<CCSample> samples{{query.t_start, query.q1_start, query.q2_start}};
        const Transform legs[3][2] = {
            {query.t_start, up_s}, {up_s, up_g}, {up_g, query.t_goal}};
        bool ok = true;
        for (int leg = 0; leg < 3 && ok; ++leg) {
            auto edge = track_cc(w, query.grasp, legs[leg][0], legs[leg][1], samples.back().q1,
                                 samples.back().q2, p.check_equilibrium);
            if (!edge) {
                ok = false;
                break;
            }
            for (CCSample& s : *edge) samples.push_back(std::move(s));
        }
        if (ok) {
            VecX e1 = samples.back().q1, e2 = samples.back().q2;
            if (cc_polish(w, query.grasp, query.t_goal, e1, e2) &&
                (e1 - query.q1_goal).lpNorm<Eigen::Infinity>() < kJunctionTol &&
                (e2 - query.q2_goal).lpNorm<Eigen::Infinity>() < kJunctionTol) {
                samples.back() = {query.t_goal, query.q1_goal, query.q2_goal};
                return make_segment(std::move(samples));
            }
        }
    }

    CCTreeVec start_tree{{query.t_start, query.q1_start, query.q2_start, -1, {}}};
    CCTreeVec goal_tree{{query.t_goal, query.q1_goal, query.q2_goal, -1, {}}};

    // A resting root cannot rotate at all: any tilt dips a corner into the
    // surface. Seed each tree with a straight vertical lift so the search has
    // clearance to turn.
    {
        auto add_lift = [&](CCTreeVec& tree) {
            Transform up = tree[0].pose;
            up.translation[2] = std::min(up.translation[2] + lift, p.bounds.hi[2]);
            auto edge = track_cc(w, query.grasp, tree[0].pose, up, tree[0].q1, tree[0].q2,
                                 p.check_equilibrium);
            if (!edge) return;
            CCVertex nv;
            nv.pose = edge->back().pose;
            nv.q1 = edge->back().q1;
            nv.q2 = edge->back().q2;
            nv.parent = 0;
            nv.edge = std::move(*edge);
            tree.push_back(std::move(nv));
        };
        add_lift(start_tree);
        add_lift(goal_tree);
    }

    CCTreeVec* ta = &start_tree;
    CCTreeVec* tb = &goal_tree;

    // Half the samples reuse an orientation from the start-to-goal rotation
    // geodesic; flips mostly need progress along that one axis.
    PosePath rot_guide(query.t_start, query.t_goal);

    int join_start = -1, join_goal = -1;
    // Every extension attempt (including connect pulls) is charged against
    // the iteration budget, so the total work is bounded.
    for (int iters_left = p.max_iters; iters_left > 0 && join_start < 0;) {
        Transform sample;
        if (rng.uniform() < 0.5) {
            sample = sample_se3(p.bounds, rng);
        } else {
            sample.rotation = rot_guide.at(rng.uniform()).rotation;
            sample.translation = Vec3(rng.uniform(p.bounds.lo[0], p.bounds.hi[0]),
                                      rng.uniform(p.bounds.lo[1], p.bounds.hi[1]),
                                      rng.uniform(p.bounds.lo[2], p.bounds.hi[2]));
        }
        --iters_left;
        const int added = cc_extend(w, query.grasp, *ta, sample, p);
        if (added >= 0) {
            // Connect: pull the other tree toward the new vertex until it
            // arrives or an extension fails.
            const Transform& target = (*ta)[added].pose;
            while (iters_left > 0) {
                --iters_left;
                const int oi = cc_extend(w, query.grasp, *tb, target, p);
                if (oi < 0) break;
                if (dist_obj((*tb)[oi].pose, target, w.metric) < 1e-9) {
                    VecX pa1 = (*ta)[added].q1, pa2 = (*ta)[added].q2;
                    VecX pb1 = (*tb)[oi].q1, pb2 = (*tb)[oi].q2;
                    if (cc_polish(w, query.grasp, target, pa1, pa2) &&
                        cc_polish(w, query.grasp, target, pb1, pb2) &&
                        (pa1 - pb1).lpNorm<Eigen::Infinity>() < kJunctionTol &&
                        (pa2 - pb2).lpNorm<Eigen::Infinity>() < kJunctionTol) {
                        const bool a_is_start = ta == &start_tree;
                        join_start = a_is_start ? added : oi;
                        join_goal = a_is_start ? oi : added;
                    }
                    break;
                }
            }
        }
        std::swap(ta, tb);
    }
    if (join_start < 0) return std::nullopt;

    // Root-to-junction on the start side, then junction-to-root on the goal
    // side with each edge reversed.
    std::vector<CCSample> samples;
    {
        std::vector<int> chain;
        for (int i = join_start; i >= 0; i = start_tree[i].parent) chain.push_back(i);
        std::reverse(chain.begin(), chain.end());
        samples.push_back({start_tree[0].pose, start_tree[0].q1, start_tree[0].q2});
        for (std::size_t i = 1; i < chain.size(); ++i)
            for (const CCSample& s : start_tree[chain[i]].edge) samples.push_back(s);
        for (int i = join_goal; i > 0; i = goal_tree[i].parent) {
            const CCVertex& v = goal_tree[i];
            // Reversed edge: parent-side samples, ending at the parent state.
            for (std::size_t k = v.edge.size(); k-- > 1;) samples.push_back(v.edge[k - 1]);
            const CCVertex& parent = goal_tree[v.parent];
            samples.push_back({parent.pose, parent.q1, parent.q2});
        }
    }
    return make_segment(std::move(samples));
}

ManipulationTrajectory shortcut_cc(const World& w, const ManipulationTrajectory& traj,
                                   int iterations, Rng& rng) {
    ManipulationTrajectory out = traj;
    for (Segment& seg : out.segments) {
        TransferSegment* ts = std::get_if<TransferSegment>(&seg);
        if (ts == nullptr) continue;
        for (int iter = 0; iter < iterations; ++iter) {
            const std::size_t n = ts->size();
            if (n < 3) break;
            std::size_t i = rng.uniform_int(n);
            std::size_t j = rng.uniform_int(n);
            if (i > j) std::swap(i, j);
            if (j - i < 2) continue;

            double old_len = 0.0;
            for (std::size_t k = i; k < j; ++k)
                old_len += composite_distance(ts->config_at(k), ts->config_at(k + 1), w.metric);

            auto edge = track_cc(w, ts->grasp, ts->object_poses[i], ts->object_poses[j],
                                 ts->arm1.samples[i], ts->arm2.samples[i], true);
            if (!edge) continue;
            // The replacement must land on the existing sample so the tail
            // stays continuous.
            if ((edge->back().q1 - ts->arm1.samples[j]).lpNorm<Eigen::Infinity>() > 1e-6 ||
                (edge->back().q2 - ts->arm2.samples[j]).lpNorm<Eigen::Infinity>() > 1e-6)
                continue;

            double new_len = 0.0;
            CompositeConfig prev = ts->config_at(i);
            for (const CCSample& s : *edge) {
                const CompositeConfig cur{s.q1, s.q2, s.pose};
                new_len += composite_distance(prev, cur, w.metric);
                prev = cur;
            }
            if (new_len >= old_len - 1e-12) continue;

            std::vector<Transform> poses(ts->object_poses.begin(),
                                         ts->object_poses.begin() + i + 1);
            std::vector<VecX> s1(ts->arm1.samples.begin(), ts->arm1.samples.begin() + i + 1);
            std::vector<VecX> s2(ts->arm2.samples.begin(), ts->arm2.samples.begin() + i + 1);
            for (std::size_t k = 0; k + 1 < edge->size(); ++k) {
                poses.push_back((*edge)[k].pose);
                s1.push_back((*edge)[k].q1);
                s2.push_back((*edge)[k].q2);
            }
            poses.insert(poses.end(), ts->object_poses.begin() + j, ts->object_poses.end());
            s1.insert(s1.end(), ts->arm1.samples.begin() + j, ts->arm1.samples.end());
            s2.insert(s2.end(), ts->arm2.samples.begin() + j, ts->arm2.samples.end());
            ts->object_poses = std::move(poses);
            ts->arm1.samples = std::move(s1);
            ts->arm2.samples = std::move(s2);
            const std::size_t m = ts->size();
            ts->arm1.times.resize(m);
            ts->arm2.times.resize(m);
            for (std::size_t k = 0; k < m; ++k) {
                const double t = m > 1 ? static_cast<double>(k) / (m - 1) : 0.0;
                ts->arm1.times[k] = t;
                ts->arm2.times[k] = t;
            }
        }
    }
    return out;
}

}  // namespace bimanip
