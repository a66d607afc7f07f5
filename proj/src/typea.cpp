#include "bimanip/typea.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <queue>

#include "bimanip/parallel.hpp"

namespace bimanip {

namespace {

const TrackTolerances kTightTol{1e-9, 1e-9, kSingularTol, 100};

constexpr double kOverlapMin = 1e-3;
constexpr double kTrackDs = 0.005;
constexpr double kRetractDistance = 0.05;
constexpr double kJointStep = 0.3;       // RRT extension step, rad (Euclidean)
constexpr double kJointCheckRes = 0.05;  // edge validation resolution, rad (inf-norm)

double elapsed_seconds(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool transit_state_valid(const World& w, const VecX& q1, const VecX& q2, const Transform& pose) {
    return w.arms[0].within_limits(q1) && w.arms[1].within_limits(q2) &&
           !is_singular(w.arms[0], q1) && !is_singular(w.arms[1], q2) &&
           check_collision_free(w, {q1, q2, pose}, false);
}

bool transit_edge_valid(const World& w, const VecX& a1, const VecX& a2, const VecX& b1,
                        const VecX& b2, const Transform& pose) {
    const double span = std::max((b1 - a1).lpNorm<Eigen::Infinity>(),
                                 (b2 - a2).lpNorm<Eigen::Infinity>());
    const int n = std::max(1, static_cast<int>(std::ceil(span / kJointCheckRes)));
    for (int i = 1; i <= n; ++i) {
        const double s = static_cast<double>(i) / n;
        if (!transit_state_valid(w, a1 + s * (b1 - a1), a2 + s * (b2 - a2), pose)) return false;
    }
    return true;
}

// Distinct valid IK solutions for one arm at a target pose.
std::vector<VecX> arm_ik_solutions(const SerialArm& arm, const Transform& target) {
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

// One differential-IK step along sigma under a fixed grasp and IK class pair.
bool grasp_track_step(const World& w, const ObjectPath& sigma, const BimanualGrasp& g, double t,
                      int class1, int class2, VecX& q1, VecX& q2, Transform& pose_out) {
    const Transform pose = sigma.pose_at(w, t);
    const Transform t1 = grasp_to_gripper_pose(pose, g.g1, w.object, w.gripper);
    const Transform t2 = grasp_to_gripper_pose(pose, g.g2, w.object, w.gripper);
    Result<VecX> r1 = solve_ik_newton(w.arms[0], t1, q1, kTightTol);
    if (!r1.ok() || !w.arms[0].within_limits(r1.value()) || is_singular(w.arms[0], r1.value()) ||
        ik_class(w.arms[0], r1.value()) != class1)
        return false;
    Result<VecX> r2 = solve_ik_newton(w.arms[1], t2, q2, kTightTol);
    if (!r2.ok() || !w.arms[1].within_limits(r2.value()) || is_singular(w.arms[1], r2.value()) ||
        ik_class(w.arms[1], r2.value()) != class2)
        return false;
    if (!check_collision_free(w, {r1.value(), r2.value(), pose}, true)) return false;
    Result<bool> eq = check_static_equilibrium(w.object, w.gripper, pose, g, w.gravity,
                                               w.friction, w.cone_edges);
    if (!eq.ok() || !eq.value()) return false;
    q1 = r1.value();
    q2 = r2.value();
    pose_out = pose;
    return true;
}

// Jointly valid IK configurations at sigma(t) with given classes.
bool seeds_at(const World& w, const ObjectPath& sigma, const BimanualGrasp& g, double t,
              int class1, int class2, VecX& q1, VecX& q2) {
    const Transform pose = sigma.pose_at(w, t);
    const Transform t1 = grasp_to_gripper_pose(pose, g.g1, w.object, w.gripper);
    const Transform t2 = grasp_to_gripper_pose(pose, g.g2, w.object, w.gripper);
    for (const VecX& a : arm_ik_solutions(w.arms[0], t1)) {
        if (ik_class(w.arms[0], a) != class1) continue;
        for (const VecX& b : arm_ik_solutions(w.arms[1], t2)) {
            if (ik_class(w.arms[1], b) != class2) continue;
            if (!check_collision_free(w, {a, b, pose}, true)) continue;
            q1 = a;
            q2 = b;
            return true;
        }
    }
    return false;
}

}  // namespace

GraspEnumeration::GraspEnumeration(const World& w) {
    std::vector<GraspParams> per_arm[2];
    for (const GraspClassId& c : enumerate_grasp_classes(w.object, w.gripper)) {
        for (int b = 1; b <= 6; ++b)
            if (grasp_fits(w.object, w.gripper, c.link, c.approach, b))
                per_arm[c.arm].push_back({c.link, c.approach, b, 0.5, 0.0});
    }
    for (int pass = 0; pass < 2; ++pass) {
        for (const GraspParams& a : per_arm[0]) {
            for (const GraspParams& b : per_arm[1]) {
                if (a.link == b.link && a.approach == b.approach) continue;
                const bool opposed =
                    a.link == b.link && (a.approach - 1) % 3 == (b.approach - 1) % 3;
                if (opposed == (pass == 0)) combos_.push_back({a, b});
            }
        }
    }
}

BimanualGrasp GraspEnumeration::element(std::size_t j) const {
    if (combos_.empty()) throw std::logic_error("GraspEnumeration: no grasp combinations");
    Combo c = combos_[j % combos_.size()];
    const std::size_t h = j / combos_.size();
    c.g1.delta = halton(h, 2);
    c.g2.delta = halton(h, 3);
    return {c.g1, c.g2};
}

Result<ObjectPath> plan_object_path(const World& w, const PlacementGrid& grid,
                                    const PlacementCoord& p_start, const PlacementCoord& p_goal) {
    int sx, sy, st, gx, gy, gt;
    if (p_start.class_id != grid.class_id || p_goal.class_id != grid.class_id ||
        !grid.locate(p_start, sx, sy, st) || !grid.locate(p_goal, gx, gy, gt) ||
        !grid.occupied(sx, sy, st) || !grid.occupied(gx, gy, gt))
        return Error{ErrorCode::kNotConnected, "endpoint outside the feasible grid"};
    if (grid.component[grid.index(sx, sy, st)] != grid.component[grid.index(gx, gy, gt)])
        return Error{ErrorCode::kDifferentComponents,
                     "start and goal lie in different grid components"};

    const int start_idx = grid.index(sx, sy, st);
    const int goal_idx = grid.index(gx, gy, gt);
    if (start_idx == goal_idx)
        return ObjectPath(grid.class_id, {Vec3(p_start.x, p_start.y, p_start.theta),
                                          Vec3(p_goal.x, p_goal.y, p_goal.theta)});

    auto theta_gap = [&](int a, int b) {
        int d = std::abs(a - b);
        return std::min(d, grid.ntheta - d) * grid.dtheta;
    };
    auto heuristic = [&](int ix, int iy, int it) {
        const double hx = (ix - gx) * grid.dx;
        const double hy = (iy - gy) * grid.dy;
        return std::hypot(hx, hy) + kThetaWeight * theta_gap(it, gt);
    };

    const int total = grid.nx * grid.ny * grid.ntheta;
    std::vector<double> dist(total, std::numeric_limits<double>::infinity());
    std::vector<int> parent(total, -1);
    using Node = std::pair<double, int>;
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    dist[start_idx] = 0.0;
    open.push({heuristic(sx, sy, st), start_idx});
    const double move_cost[3] = {grid.dx, grid.dy, kThetaWeight * grid.dtheta};
    while (!open.empty()) {
        const auto [f, idx] = open.top();
        open.pop();
        if (idx == goal_idx) break;
        const int it = idx % grid.ntheta;
        const int iy = (idx / grid.ntheta) % grid.ny;
        const int ix = idx / (grid.ntheta * grid.ny);
        if (f > dist[idx] + heuristic(ix, iy, it) + 1e-12) continue;
        const int moves[6][4] = {{1, 0, 0, 0},  {-1, 0, 0, 0}, {0, 1, 0, 1},
                                 {0, -1, 0, 1}, {0, 0, 1, 2},  {0, 0, -1, 2}};
        for (const auto& m : moves) {
            const int nx2 = ix + m[0];
            const int ny2 = iy + m[1];
            if (nx2 < 0 || nx2 >= grid.nx || ny2 < 0 || ny2 >= grid.ny) continue;
            const int nt = (it + m[2] + grid.ntheta) % grid.ntheta;
            const int nidx = grid.index(nx2, ny2, nt);
            if (!grid.occupancy[nidx]) continue;
            const double nd = dist[idx] + move_cost[m[3]];
            if (nd < dist[nidx] - 1e-15) {
                dist[nidx] = nd;
                parent[nidx] = idx;
                open.push({nd + heuristic(nx2, ny2, nt), nidx});
            }
        }
    }
    if (!std::isfinite(dist[goal_idx]))
        return Error{ErrorCode::kDifferentComponents, "no lattice path found"};

    // Reconstruct with theta unwrapped along the move sequence.
    std::vector<int> cells;
    for (int idx = goal_idx; idx >= 0; idx = parent[idx]) cells.push_back(idx);
    std::reverse(cells.begin(), cells.end());
    std::vector<Vec3> pts;
    pts.emplace_back(p_start.x, p_start.y, p_start.theta);
    double theta = p_start.theta;
    int prev_t = st;
    for (std::size_t i = 1; i < cells.size(); ++i) {
        const int it = cells[i] % grid.ntheta;
        const int iy = (cells[i] / grid.ntheta) % grid.ny;
        const int ix = cells[i] / (grid.ntheta * grid.ny);
        int dt = it - prev_t;
        if (dt > grid.ntheta / 2) dt -= grid.ntheta;
        if (dt < -grid.ntheta / 2) dt += grid.ntheta;
        theta += dt * grid.dtheta;
        prev_t = it;
        pts.emplace_back(grid.x0 + ix * grid.dx, grid.y0 + iy * grid.dy, theta);
    }
    // Snap the tail to the exact goal coord (same cell as the last waypoint).
    double goal_theta = p_goal.theta;
    while (goal_theta - theta > M_PI) goal_theta -= 2.0 * M_PI;
    while (goal_theta - theta < -M_PI) goal_theta += 2.0 * M_PI;
    pts.emplace_back(p_goal.x, p_goal.y, goal_theta);

    // Greedy line-of-sight shortcutting validated against the grid.
    auto segment_free = [&](const Vec3& a, const Vec3& b) {
        const Vec3 d = b - a;
        const double len = std::hypot(d[0], d[1]) + kThetaWeight * std::abs(d[2]);
        const int n = std::max(1, static_cast<int>(std::ceil(len / 0.005)));
        for (int i = 0; i <= n; ++i) {
            const Vec3 p = a + (static_cast<double>(i) / n) * d;
            if (!grid.contains({grid.class_id, p[0], p[1], p[2]})) return false;
        }
        return true;
    };
    std::vector<Vec3> smooth;
    std::size_t i = 0;
    smooth.push_back(pts[0]);
    while (i + 1 < pts.size()) {
        std::size_t j = pts.size() - 1;
        while (j > i + 1 && !segment_free(pts[i], pts[j])) --j;
        smooth.push_back(pts[j]);
        i = j;
    }
    return ObjectPath(grid.class_id, smooth);
}

bool check_cover(const std::vector<CoverageInterval>& intervals, double overlap_min) {
    double reach = -1.0;  // negative: nothing chosen yet
    while (true) {
        const double need = reach < 0.0 ? 0.0 : reach - overlap_min;
        double best = reach;
        for (const CoverageInterval& iv : intervals)
            if (iv.a <= need + 1e-12 && iv.b > best) best = iv.b;
        if (best >= 1.0) return true;
        if (best <= reach) return false;
        reach = best;
    }
}

Result<TransitSegment> plan_transit(const World& w, const CompositeConfig& c_from,
                                    const CompositeConfig& c_to, const PlanBudget& budget,
                                    Rng& rng) {
    const Transform pose = c_from.pose;
    if ((pose.translation - c_to.pose.translation).norm() > 1e-9 ||
        geodesic_distance(pose.rotation, c_to.pose.rotation) > 1e-9)
        throw std::invalid_argument("plan_transit: configurations disagree on the object pose");
    if (!transit_state_valid(w, c_from.q1, c_from.q2, pose) ||
        !transit_state_valid(w, c_to.q1, c_to.q2, pose))
        throw std::invalid_argument("plan_transit: endpoint configuration invalid");

    TransitSegment seg;
    seg.object_pose = pose;
    seg.arm1.arm_id = 0;
    seg.arm2.arm_id = 1;
    auto push = [&](const VecX& q1, const VecX& q2) {
        if (!seg.arm1.samples.empty() &&
            (seg.arm1.samples.back() - q1).lpNorm<Eigen::Infinity>() < 1e-12 &&
            (seg.arm2.samples.back() - q2).lpNorm<Eigen::Infinity>() < 1e-12)
            return;
        seg.arm1.samples.push_back(q1);
        seg.arm2.samples.push_back(q2);
    };
    push(c_from.q1, c_from.q2);

    const double dq = (c_from.q1 - c_to.q1).lpNorm<Eigen::Infinity>() +
                      (c_from.q2 - c_to.q2).lpNorm<Eigen::Infinity>();
    if (dq < 1e-12) {
        seg.arm1.times = {0.0};
        seg.arm2.times = {0.0};
        return seg;
    }

    // Retract one arm's gripper along its approach axis, other arm held.
    auto retract = [&](int arm_idx, VecX& q, const VecX& other, bool other_first) {
        const SerialArm& arm = w.arms[arm_idx];
        const Transform start = forward_kinematics(arm, q);
        const Vec3 dir = -(start.rotation.matrix().col(2));
        const int n = 10;
        for (int i = 1; i <= n; ++i) {
            Transform target = start;
            target.translation += dir * (kRetractDistance * i / n);
            Result<VecX> r = solve_ik_newton(arm, target, q);
            if (!r.ok()) break;
            const VecX& q1c = arm_idx == 0 ? r.value() : other;
            const VecX& q2c = arm_idx == 0 ? other : r.value();
            if (!transit_state_valid(w, q1c, q2c, pose)) break;
            (void)other_first;
            q = r.value();
            push(q1c, q2c);
        }
    };

    VecX a1 = c_from.q1, a2 = c_from.q2;
    retract(0, a1, a2, false);
    retract(1, a2, a1, false);

    // Approach configs at the goal side, generated by retracting backward.
    std::vector<std::pair<VecX, VecX>> approach;
    VecX b1 = c_to.q1, b2 = c_to.q2;
    {
        approach.emplace_back(b1, b2);
        auto retract_goal = [&](int arm_idx, VecX& q, const VecX& other) {
            const SerialArm& arm = w.arms[arm_idx];
            const Transform start = forward_kinematics(arm, q);
            const Vec3 dir = -(start.rotation.matrix().col(2));
            const int n = 10;
            for (int i = 1; i <= n; ++i) {
                Transform target = start;
                target.translation += dir * (kRetractDistance * i / n);
                Result<VecX> r = solve_ik_newton(arm, target, q);
                if (!r.ok()) break;
                const VecX& q1c = arm_idx == 0 ? r.value() : other;
                const VecX& q2c = arm_idx == 0 ? other : r.value();
                if (!transit_state_valid(w, q1c, q2c, pose)) break;
                q = r.value();
                approach.emplace_back(q1c, q2c);
            }
        };
        retract_goal(1, b2, b1);
        retract_goal(0, b1, b2);
    }

    // Middle: straight line when it validates, else bidirectional RRT over
    // both arms' joints.
    std::vector<std::pair<VecX, VecX>> middle;
    if (transit_edge_valid(w, a1, a2, b1, b2, pose)) {
        middle.emplace_back(b1, b2);
    } else {
        const int d1 = w.arms[0].dof();
        const int d2 = w.arms[1].dof();
        auto cat = [&](const VecX& q1, const VecX& q2) {
            VecX v(d1 + d2);
            v << q1, q2;
            return v;
        };
        auto split1 = [&](const VecX& v) { return VecX(v.head(d1)); };
        auto split2 = [&](const VecX& v) { return VecX(v.tail(d2)); };
        struct Node {
            VecX q;
            int parent;
        };
        std::vector<Node> ta{{cat(a1, a2), -1}};
        std::vector<Node> tb{{cat(b1, b2), -1}};
        bool a_is_start = true;
        int join_a = -1, join_b = -1;
        auto sample = [&]() {
            VecX v(d1 + d2);
            for (int i = 0; i < d1; ++i)
                v[i] = rng.uniform(w.arms[0].joints[i].lo, w.arms[0].joints[i].hi);
            for (int i = 0; i < d2; ++i)
                v[d1 + i] = rng.uniform(w.arms[1].joints[i].lo, w.arms[1].joints[i].hi);
            return v;
        };
        auto nearest = [](const std::vector<Node>& tree, const VecX& q) {
            int best = 0;
            double bd = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < tree.size(); ++i) {
                const double d = (tree[i].q - q).norm();
                if (d < bd) {
                    bd = d;
                    best = static_cast<int>(i);
                }
            }
            return best;
        };
        auto extend = [&](std::vector<Node>& tree, const VecX& target) -> int {
            const int ni = nearest(tree, target);
            VecX q = target;
            const double d = (q - tree[ni].q).norm();
            if (d > kJointStep) q = tree[ni].q + (kJointStep / d) * (q - tree[ni].q);
            if (!transit_edge_valid(w, split1(tree[ni].q), split2(tree[ni].q), split1(q),
                                    split2(q), pose))
                return -1;
            tree.push_back({q, ni});
            return static_cast<int>(tree.size()) - 1;
        };
        for (int iter = 0; iter < budget.max_rrt_iters && join_a < 0; ++iter) {
            std::vector<Node>& grow = a_is_start ? ta : tb;
            std::vector<Node>& other = a_is_start ? tb : ta;
            const int added = extend(grow, sample());
            if (added >= 0) {
                // Connect: greedily step the other tree toward the new vertex.
                int oi = nearest(other, grow[added].q);
                while (true) {
                    const int next = extend(other, grow[added].q);
                    if (next < 0) break;
                    oi = next;
                    if ((other[oi].q - grow[added].q).norm() < 1e-9) {
                        join_a = a_is_start ? added : oi;
                        join_b = a_is_start ? oi : added;
                        break;
                    }
                }
            }
            a_is_start = !a_is_start;
        }
        if (join_a < 0)
            return Error{ErrorCode::kBudgetExhausted, "transit RRT budget exhausted"};
        std::vector<VecX> path_a, path_b;
        for (int i = join_a; i >= 0; i = ta[i].parent) path_a.push_back(ta[i].q);
        std::reverse(path_a.begin(), path_a.end());
        for (int i = join_b; i >= 0; i = tb[i].parent) path_b.push_back(tb[i].q);
        std::vector<VecX> joint_path = path_a;
        for (const VecX& q : path_b)
            if ((joint_path.back() - q).norm() > 1e-12) joint_path.push_back(q);

        // Shortcut: random pair replacement when the straight edge validates.
        for (int iter = 0; iter < 50 && joint_path.size() > 2; ++iter) {
            const int i = static_cast<int>(rng.uniform_int(joint_path.size() - 1));
            const int j =
                i + 1 + static_cast<int>(rng.uniform_int(joint_path.size() - 1 - i));
            if (j <= i + 1) continue;
            if (transit_edge_valid(w, split1(joint_path[i]), split2(joint_path[i]),
                                   split1(joint_path[j]), split2(joint_path[j]), pose))
                joint_path.erase(joint_path.begin() + i + 1, joint_path.begin() + j);
        }
        for (std::size_t i = 1; i < joint_path.size(); ++i)
            middle.emplace_back(split1(joint_path[i]), split2(joint_path[i]));
    }

    // Densify every coarse edge so downstream per-sample checks see the whole
    // motion.
    auto push_edge = [&](const VecX& q1, const VecX& q2) {
        const VecX& p1 = seg.arm1.samples.back();
        const VecX& p2 = seg.arm2.samples.back();
        const double span = std::max((q1 - p1).lpNorm<Eigen::Infinity>(),
                                     (q2 - p2).lpNorm<Eigen::Infinity>());
        const int n = std::max(1, static_cast<int>(std::ceil(span / kJointCheckRes)));
        for (int i = 1; i <= n; ++i) {
            const double s = static_cast<double>(i) / n;
            push(p1 + s * (q1 - p1), p2 + s * (q2 - p2));
        }
    };
    for (const auto& [q1, q2] : middle) push_edge(q1, q2);
    for (auto it = approach.rbegin(); it != approach.rend(); ++it) push_edge(it->first, it->second);

    const std::size_t n = seg.arm1.samples.size();
    seg.arm1.times.resize(n);
    seg.arm2.times.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
        seg.arm1.times[i] = t;
        seg.arm2.times[i] = t;
    }
    return seg;
}

std::vector<CoverageInterval> element_coverage(const World& w, const ObjectPath& sigma,
                                               const BimanualGrasp& g, double ds) {
    std::vector<CoverageInterval> out;
    // Seed classes from the first path point where a jointly valid IK pair
    // exists; one coverage pass per distinct class pair found there.
    for (int k = 0; k <= 20; ++k) {
        const double t = k / 20.0;
        const Transform pose = sigma.pose_at(w, t);
        const Transform t1 = grasp_to_gripper_pose(pose, g.g1, w.object, w.gripper);
        const Transform t2 = grasp_to_gripper_pose(pose, g.g2, w.object, w.gripper);
        const auto s1 = arm_ik_solutions(w.arms[0], t1);
        if (s1.empty()) continue;
        const auto s2 = arm_ik_solutions(w.arms[1], t2);
        if (s2.empty()) continue;
        std::vector<std::pair<int, int>> seen;
        for (const VecX& q1 : s1) {
            for (const VecX& q2 : s2) {
                if (!check_collision_free(w, {q1, q2, pose}, true)) continue;
                const std::pair<int, int> cls{ik_class(w.arms[0], q1), ik_class(w.arms[1], q2)};
                if (cls.first == kIndeterminateIkClass || cls.second == kIndeterminateIkClass)
                    continue;
                if (std::find(seen.begin(), seen.end(), cls) != seen.end()) continue;
                seen.push_back(cls);
                const auto ivs = path_grasp_coverage(w, sigma, g, q1, q2, ds);
                out.insert(out.end(), ivs.begin(), ivs.end());
                if (seen.size() >= 4) break;
            }
            if (seen.size() >= 4) break;
        }
        if (!seen.empty()) break;
    }
    return out;
}

Result<ManipulationTrajectory> plan_typea(const World& w, const ObjectPath& sigma,
                                          const PlanBudget& budget, Rng& rng) {
    const auto t0 = std::chrono::steady_clock::now();
    GraspEnumeration enumeration(w);

    std::vector<CoverageInterval> intervals;
    bool covered = false;
    const int batch = std::max(1, default_thread_count());
    for (int base = 0; base < budget.max_elements && !covered; base += batch) {
        const int count = std::min(batch, budget.max_elements - base);
        std::vector<std::vector<CoverageInterval>> results(count);
        parallel_for(count, [&](int i) {
            results[i] = element_coverage(w, sigma, enumeration.element(base + i));
        });
        for (const auto& r : results) intervals.insert(intervals.end(), r.begin(), r.end());
        covered = check_cover(intervals);
        if (elapsed_seconds(t0) > budget.max_seconds) break;
    }
    if (!covered)
        return Error{ErrorCode::kBudgetExhausted, "grasp enumeration never covered the path",
                     static_cast<int>(intervals.size())};

    // Greedy farthest-reach interval chain with midpoint handovers.
    std::vector<const CoverageInterval*> chain;
    std::vector<double> handovers;  // between chain[i] and chain[i+1]
    double reach = -1.0;
    while (reach < 1.0) {
        const double need = reach < 0.0 ? 0.0 : reach - kOverlapMin;
        const CoverageInterval* best = nullptr;
        for (const CoverageInterval& iv : intervals)
            if (iv.a <= need + 1e-12 && (best == nullptr || iv.b > best->b)) best = &iv;
        if (best == nullptr || best->b <= reach)
            return Error{ErrorCode::kBudgetExhausted, "cover selection failed"};
        if (!chain.empty()) handovers.push_back(0.5 * (best->a + reach));
        chain.push_back(best);
        reach = best->b;
    }

    // Track each transfer segment over its parameter range.
    ManipulationTrajectory traj;
    std::vector<TransferSegment> transfers;
    for (std::size_t i = 0; i < chain.size(); ++i) {
        const double ta = i == 0 ? 0.0 : handovers[i - 1];
        const double tb = i + 1 == chain.size() ? 1.0 : handovers[i];
        const CoverageInterval& iv = *chain[i];
        VecX q1, q2;
        if (!seeds_at(w, sigma, iv.grasp, ta, iv.ik_class1, iv.ik_class2, q1, q2))
            return Error{ErrorCode::kTransitFailed, "no IK at segment start", -1, ta};
        TransferSegment seg;
        seg.grasp = iv.grasp;
        seg.arm1.arm_id = 0;
        seg.arm2.arm_id = 1;
        const int n = std::max(1, static_cast<int>(std::ceil((tb - ta) / kTrackDs)));
        for (int k = 0; k <= n; ++k) {
            const double t = ta + (tb - ta) * k / n;
            Transform pose;
            if (k == 0) {
                pose = sigma.pose_at(w, t);
            } else if (!grasp_track_step(w, sigma, iv.grasp, t, iv.ik_class1, iv.ik_class2, q1,
                                         q2, pose)) {
                return Error{ErrorCode::kTransitFailed, "transfer tracking failed", -1, t};
            }
            seg.object_poses.push_back(pose);
            seg.arm1.samples.push_back(q1);
            seg.arm2.samples.push_back(q2);
            seg.arm1.times.push_back(t);
            seg.arm2.times.push_back(t);
        }
        transfers.push_back(std::move(seg));
    }

    for (std::size_t i = 0; i < transfers.size(); ++i) {
        traj.segments.emplace_back(std::move(transfers[i]));
        if (i + 1 < transfers.size()) {
            const CompositeConfig c_from =
                segment_end(traj.segments.back());
            const TransferSegment& next = transfers[i + 1];
            const CompositeConfig c_to = next.config_at(0);
            Result<TransitSegment> transit = plan_transit(w, c_from, c_to, budget, rng);
            if (!transit.ok())
                return Error{ErrorCode::kTransitFailed, transit.error().message, -1,
                             handovers[i]};
            traj.segments.emplace_back(std::move(transit).take());
        }
    }
    return traj;
}

}  // namespace bimanip
