#include "bimanip/grasp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bimanip/lp.hpp"

namespace bimanip {

namespace {

int axis_index(int code) {
    if (code < 1 || code > 6) throw std::invalid_argument("axis code outside 1..6");
    return (code - 1) % 3;
}

// Half-length of the finger overlap with the box along the approach axis.
double engagement(const GripperGeometry& gripper, double half_approach) {
    return std::min(gripper.finger_depth, 2.0 * half_approach) / 2.0;
}

// Grasp frame in the link frame: z = approach d (into the box), y = sliding s,
// x = s cross d. Origin at the approached face, pushed in by the engagement
// and slid along s by delta.
Transform grasp_in_link(const GraspParams& g, const BoxShape& link,
                        const GripperGeometry& gripper) {
    const Vec3 d = axis_from_code(g.approach);
    const Vec3 s = axis_from_code(g.sliding);
    const double ha = link.half[axis_index(g.approach)];
    const double hb = link.half[axis_index(g.sliding)];
    const double e = engagement(gripper, ha);

    const Vec3 p = -d * ha + d * e + s * (g.delta - 0.5) * 2.0 * hb;
    Mat3 r;
    r.col(0) = s.cross(d);
    r.col(1) = s;
    r.col(2) = d;
    Transform t{Rotation(r), p};
    if (g.tilt != 0.0) t.rotation = t.rotation * Rotation::rot_x(g.tilt);
    return t;
}

}  // namespace

Vec3 axis_from_code(int code) {
    const int i = axis_index(code);
    Vec3 v = Vec3::Zero();
    v[i] = code <= 3 ? 1.0 : -1.0;
    return v;
}

void GraspParams::validate(const ObjectModel& object) const {
    if (link < 0 || link >= static_cast<int>(object.links.size()))
        throw std::invalid_argument("GraspParams: link index out of range");
    if (approach < 1 || approach > 6 || sliding < 1 || sliding > 6)
        throw std::invalid_argument("GraspParams: axis code outside 1..6");
    if (axis_index(approach) == axis_index(sliding))
        throw std::invalid_argument("GraspParams: sliding axis not orthogonal to approach");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("GraspParams: delta outside (0, 1)");
}

bool grasp_fits(const ObjectModel& object, const GripperGeometry& gripper, int link,
                int approach, int sliding) {
    if (axis_index(approach) == axis_index(sliding)) return false;
    const int lateral = 3 - axis_index(approach) - axis_index(sliding);
    const Vec3& half = object.links[link].half;
    return gripper.finger_depth > 0.0 && 2.0 * half[lateral] <= gripper.stroke;
}

std::vector<GraspClassId> enumerate_grasp_classes(const ObjectModel& object,
                                                  const GripperGeometry& gripper) {
    std::vector<GraspClassId> out;
    for (int arm = 0; arm < 2; ++arm) {
        for (int link = 0; link < static_cast<int>(object.links.size()); ++link) {
            for (int a = 1; a <= 6; ++a) {
                bool any = false;
                for (int b = 1; b <= 6 && !any; ++b)
                    any = grasp_fits(object, gripper, link, a, b);
                if (any) out.push_back({arm, link, a});
            }
        }
    }
    return out;
}

Transform grasp_to_gripper_pose(const Transform& object_pose, const GraspParams& g,
                                const ObjectModel& object, const GripperGeometry& gripper) {
    g.validate(object);
    const BoxShape& link = object.links[g.link];
    return object_pose * link.frame * grasp_in_link(g, link, gripper);
}

std::vector<Obb> gripper_obbs_at(const Transform& gripper_pose, const GripperGeometry& gripper) {
    std::vector<Obb> out;
    out.reserve(gripper.shapes.size());
    for (const BoxShape& s : gripper.shapes) out.push_back(make_obb(gripper_pose, s));
    return out;
}

bool grippers_overlap(const Transform& object_pose, const BimanualGrasp& g,
                      const ObjectModel& object, const GripperGeometry& gripper) {
    const auto a = gripper_obbs_at(grasp_to_gripper_pose(object_pose, g.g1, object, gripper),
                                   gripper);
    const auto b = gripper_obbs_at(grasp_to_gripper_pose(object_pose, g.g2, object, gripper),
                                   gripper);
    for (const Obb& oa : a)
        for (const Obb& ob : b)
            if (obb_overlap(oa, ob)) return true;
    return false;
}

Result<GraspIk> validate_bimanual_grasp(const World& w, const Transform& object_pose,
                                        const BimanualGrasp& g, int seed_count) {
    const Transform t1 = grasp_to_gripper_pose(object_pose, g.g1, w.object, w.gripper);
    const Transform t2 = grasp_to_gripper_pose(object_pose, g.g2, w.object, w.gripper);

    // All distinct IK solutions per arm; pairs are then screened jointly.
    auto solutions = [&](const SerialArm& arm, const Transform& target) {
        std::vector<VecX> sols;
        for (const VecX& seed : ik_seed_grid(arm, target.translation, seed_count)) {
            Result<VecX> r = solve_ik_newton(arm, target, seed);
            if (!r.ok()) continue;
            const VecX& q = r.value();
            if (!arm.within_limits(q) || is_singular(arm, q)) continue;
            bool dup = false;
            for (const VecX& s : sols)
                if ((s - q).lpNorm<Eigen::Infinity>() < 1e-6) dup = true;
            if (!dup) sols.push_back(q);
        }
        return sols;
    };

    const std::vector<VecX> s1 = solutions(w.arms[0], t1);
    const std::vector<VecX> s2 = solutions(w.arms[1], t2);
    if (s1.empty() || s2.empty())
        return Error{ErrorCode::kIkUnreachable, "no IK solution for a grasp pose",
                     s1.empty() ? 0 : 1};

    for (const VecX& q1 : s1) {
        for (const VecX& q2 : s2) {
            if (check_collision_free(w, CompositeConfig{q1, q2, object_pose}, true))
                return GraspIk{q1, q2};
        }
    }
    return Error{ErrorCode::kCollision, "every IK solution pair is in collision"};
}

Result<bool> check_static_equilibrium(const ObjectModel& object, const GripperGeometry& gripper,
                                      const Transform& object_pose, const BimanualGrasp& g,
                                      const Vec3& gravity, double mu, int cone_edges) {
    if (cone_edges < 3) throw std::invalid_argument("cone_edges must be >= 3");
    if (mu <= 0.0) throw std::invalid_argument("mu must be positive");
    g.g1.validate(object);
    g.g2.validate(object);

    const Vec3 com_world = object_pose * object.center_of_mass;

    // Columns of the 6 x (2 * 2 * 4 * cone_edges) contact-wrench matrix:
    // friction-cone edge forces at the four corners of each finger pad,
    // torques taken about the object's center of mass.
    std::vector<Vec6> cols;
    const GraspParams* grasps[2] = {&g.g1, &g.g2};
    for (const GraspParams* gp : grasps) {
        const BoxShape& link = object.links[gp->link];
        const Transform grasp_world = object_pose * link.frame * grasp_in_link(*gp, link, gripper);
        const Mat3 r = grasp_world.rotation.matrix();
        const Vec3 lateral = r.col(0);
        const Vec3 sliding = r.col(1);
        const Vec3 approach = r.col(2);
        const int li = 3 - axis_index(gp->approach) - axis_index(gp->sliding);
        const double hl = link.half[li];

        for (int finger = 0; finger < 2; ++finger) {
            const double side = finger == 0 ? 1.0 : -1.0;
            // Pad patch center on the lateral face; force pushes into the box.
            const Vec3 center = grasp_world.translation + side * hl * lateral;
            const Vec3 normal = -side * lateral;
            for (int corner = 0; corner < 4; ++corner) {
                const double cs = corner & 1 ? 1.0 : -1.0;
                const double ca = corner & 2 ? 1.0 : -1.0;
                const Vec3 point =
                    center + cs * gripper.pad_half[0] * sliding + ca * gripper.pad_half[1] * approach;
                for (int e = 0; e < cone_edges; ++e) {
                    const double phi = 2.0 * M_PI * e / cone_edges;
                    const Vec3 f =
                        (normal + mu * (std::cos(phi) * sliding + std::sin(phi) * approach))
                            .normalized();
                    Vec6 col;
                    col.head<3>() = f;
                    col.tail<3>() = (point - com_world).cross(f);
                    cols.push_back(col);
                }
            }
        }
    }

    MatX a(6, static_cast<int>(cols.size()));
    for (int j = 0; j < a.cols(); ++j) a.col(j) = cols[j];
    Vec6 b;
    b.head<3>() = -object.mass * gravity;
    b.tail<3>().setZero();

    switch (lp_equality_feasible(a, b)) {
        case LpStatus::kFeasible: return true;
        case LpStatus::kInfeasible: return false;
        case LpStatus::kFailed: break;
    }
    return Error{ErrorCode::kLpFailure, "equilibrium LP did not converge"};
}

}  // namespace bimanip
