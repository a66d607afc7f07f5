#include "bimanip/kinematics.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace bimanip {

bool SerialArm::within_limits(const VecX& q, double slack) const {
    if (q.size() != dof()) return false;
    for (int i = 0; i < dof(); ++i)
        if (q[i] < joints[i].lo - slack || q[i] > joints[i].hi + slack) return false;
    return true;
}

void SerialArm::validate() const {
    for (const auto& j : joints) {
        if (std::abs(j.axis.norm() - 1.0) > 1e-9)
            throw std::invalid_argument("SerialArm: joint axis not unit length");
        if (!(j.lo < j.hi)) throw std::invalid_argument("SerialArm: joint limits lo >= hi");
    }
    if (!link_shapes.empty() && link_shapes.size() != joints.size() + 2)
        throw std::invalid_argument("SerialArm: link_shapes must cover base..gripper");
    for (int b : branch_joints)
        if (b < 0 || b >= dof()) throw std::invalid_argument("SerialArm: branch joint index");
    if (home.size() != dof() || !within_limits(home))
        throw std::invalid_argument("SerialArm: home configuration invalid");
}

std::vector<Transform> link_frames(const SerialArm& arm, const VecX& q) {
    if (q.size() != arm.dof())
        throw std::invalid_argument("link_frames: joint vector size mismatch");
    std::vector<Transform> frames;
    frames.reserve(arm.joints.size() + 2);
    Transform f = arm.base;
    frames.push_back(f);
    for (std::size_t i = 0; i < arm.joints.size(); ++i) {
        const auto& j = arm.joints[i];
        f = f * j.origin;
        f.rotation = f.rotation * Rotation::axis_angle(j.axis, q[static_cast<int>(i)]);
        frames.push_back(f);
    }
    frames.push_back(f * arm.tool);
    return frames;
}

Transform forward_kinematics(const SerialArm& arm, const VecX& q) {
    if (!arm.within_limits(q))
        throw std::invalid_argument("forward_kinematics: joint limits violated");
    return link_frames(arm, q).back();
}

Mat6X jacobian(const SerialArm& arm, const VecX& q) {
    if (!arm.within_limits(q))
        throw std::invalid_argument("jacobian: joint limits violated");
    const auto frames = link_frames(arm, q);
    const Vec3 p_ee = frames.back().translation;
    Mat6X j(6, arm.dof());
    for (int i = 0; i < arm.dof(); ++i) {
        // The joint axis is fixed under its own rotation, so the post-rotation
        // frame gives the world axis directly.
        const Vec3 w = frames[i + 1].rotation * arm.joints[i].axis;
        const Vec3 p = frames[i + 1].translation;
        j.block<3, 1>(0, i) = w;
        j.block<3, 1>(3, i) = w.cross(p_ee - p);
    }
    return j;
}

double min_singular_value(const SerialArm& arm, const VecX& q) {
    Eigen::JacobiSVD<MatX> svd(jacobian(arm, q));
    return svd.singularValues().tail(1)(0);
}

bool is_singular(const SerialArm& arm, const VecX& q, double tol) {
    if (std::isinf(tol)) return true;
    return min_singular_value(arm, q) < tol;
}

int ik_class(const SerialArm& arm, const VecX& q, double tol) {
    if (is_singular(arm, q, tol)) return kIndeterminateIkClass;
    int label = 0;
    for (std::size_t k = 0; k < arm.branch_joints.size(); ++k)
        if (q[arm.branch_joints[k]] > 0.0) label |= 1 << k;
    return label;
}

Vec6 pose_error(const Transform& target, const Transform& current) {
    const Mat3 rel = target.rotation.matrix() * current.rotation.matrix().transpose();
    Eigen::AngleAxisd aa(rel);
    Vec6 e;
    e.head<3>() = aa.angle() * aa.axis();
    e.tail<3>() = target.translation - current.translation;
    return e;
}

namespace {

struct NewtonOutcome {
    bool converged = false;
    double sigma_min = 0.0;
};

// Jacobian from precomputed link frames, avoiding a second FK pass.
Mat6X jacobian_from_frames(const SerialArm& arm, const std::vector<Transform>& frames) {
    const Vec3 p_ee = frames.back().translation;
    Mat6X j(6, arm.dof());
    for (int i = 0; i < arm.dof(); ++i) {
        const Vec3 w = frames[i + 1].rotation * arm.joints[i].axis;
        const Vec3 p = frames[i + 1].translation;
        j.block<3, 1>(0, i) = w;
        j.block<3, 1>(3, i) = w.cross(p_ee - p);
    }
    return j;
}

// One full Newton solve toward `target` with fixed-damping least squares,
// dq = J^T (J J^T + lambda^2 I)^-1 e. The damping biases only the step, not
// the fixed point, so convergence is still to e = 0. Steps are clamped to a
// trust region; q is clamped to limits every iteration so convergence is
// judged on in-limit configurations. The minimum singular value is computed
// once at exit, where callers use it for the singularity check.
NewtonOutcome newton_to_target(const SerialArm& arm, const Transform& target, VecX& q,
                               const TrackTolerances& tol, double max_step = 0.5) {
    constexpr double kLambda2 = 1e-6;
    NewtonOutcome out;
    Mat6X j(6, arm.dof());
    for (int it = 0; it < tol.max_newton_iters; ++it) {
        const auto frames = link_frames(arm, q);
        const Vec6 e = pose_error(target, frames.back());
        j = jacobian_from_frames(arm, frames);
        if (e.head<3>().norm() < tol.rot_tol && e.tail<3>().norm() < tol.pos_tol) {
            out.converged = true;
            break;
        }
        Eigen::Matrix<double, 6, 6> jjt = j * j.transpose();
        jjt.diagonal().array() += kLambda2;
        VecX dq = j.transpose() * jjt.ldlt().solve(e);
        const double n = dq.norm();
        if (n > max_step) dq *= max_step / n;
        q += dq;
        for (int i = 0; i < arm.dof(); ++i)
            q[i] = std::clamp(q[i], arm.joints[i].lo, arm.joints[i].hi);
    }
    out.sigma_min = Eigen::JacobiSVD<MatX>(j).singularValues().tail(1)(0);
    return out;
}

}  // namespace

Result<VecX> solve_ik_newton(const SerialArm& arm, const Transform& target, const VecX& seed,
                             const TrackTolerances& tol) {
    VecX q = seed;
    const NewtonOutcome out = newton_to_target(arm, target, q, tol);
    if (!out.converged)
        return Error{ErrorCode::kIkUnreachable, "IK Newton did not converge"};
    if (out.sigma_min < tol.singular_tol)
        return Error{ErrorCode::kSingular, "IK solution is singular"};
    return q;
}

std::vector<VecX> ik_seed_grid(const SerialArm& arm, const Vec3& target_position, int count) {
    std::vector<VecX> seeds;
    const int n = arm.dof();
    if (n != 6) {
        seeds.push_back(arm.home);
        return seeds;
    }
    // Pan joint aimed at the target (exact aim first, then offset aims for
    // grasps that need the wrist to wrap around), elbow/wrist branch signs
    // enumerated.
    const Vec3 local = arm.base.inverse() * target_position;
    const double aim = std::atan2(local.y(), local.x());
    const double pans[] = {aim, aim + 0.8, aim - 0.8};
    const double shoulder[] = {0.6, 1.1};
    const double elbow[] = {1.7, -1.7};
    const double wrist[] = {-1.1, 1.1};
    for (double p : pans) {
        for (double s : shoulder) {
            for (int e = 0; e < 2; ++e) {
                VecX q = VecX::Zero(6);
                q[0] = std::clamp(p, arm.joints[0].lo, arm.joints[0].hi);
                q[1] = std::clamp(s, arm.joints[1].lo, arm.joints[1].hi);
                q[2] = std::clamp(elbow[e], arm.joints[2].lo, arm.joints[2].hi);
                q[4] = std::clamp(wrist[e], arm.joints[4].lo, arm.joints[4].hi);
                seeds.push_back(q);
                VecX q2 = q;
                q2[4] = -q2[4];
                seeds.push_back(q2);
                if (static_cast<int>(seeds.size()) >= count) return seeds;
            }
        }
    }
    return seeds;
}

Result<VecX> solve_ik(const SerialArm& arm, const Transform& target, int seed_count) {
    const auto seeds = ik_seed_grid(arm, target.translation, seed_count);
    for (const auto& seed : seeds) {
        auto r = solve_ik_newton(arm, target, seed);
        if (r) return r;
    }
    return Error{ErrorCode::kIkUnreachable, "IK failed from all seeds"};
}

Result<JointTrajectory> track_targets(const SerialArm& arm, const VecX& q0,
                                      const std::vector<Transform>& targets,
                                      const TrackTolerances& tol) {
    if (targets.empty()) throw std::invalid_argument("track_targets: no targets");
    {
        const Vec6 e0 = pose_error(targets.front(), link_frames(arm, q0).back());
        if (e0.head<3>().norm() > 1e-6 || e0.tail<3>().norm() > 1e-6)
            throw std::invalid_argument("track_targets: q0 does not match the first target");
    }
    JointTrajectory traj;
    traj.times.reserve(targets.size());
    traj.samples.reserve(targets.size());
    VecX q = q0;
    const int last = static_cast<int>(targets.size()) - 1;
    for (int i = 0; i <= last; ++i) {
        // Tracking steps are small, so a tight trust region keeps the solver
        // on the same IK branch.
        NewtonOutcome out = newton_to_target(arm, targets[i], q, tol, 0.3);
        if (!out.converged)
            return Error{ErrorCode::kTrackingDiverged, "tracking Newton diverged", i};
        if (out.sigma_min < tol.singular_tol)
            return Error{ErrorCode::kTrackingSingular, "tracking hit a singularity", i};
        if (!arm.within_limits(q))
            return Error{ErrorCode::kTrackingLimit, "tracking hit a joint limit", i};
        for (int k = 0; k < arm.dof(); ++k) {
            if (q[k] <= arm.joints[k].lo + 1e-12 || q[k] >= arm.joints[k].hi - 1e-12)
                return Error{ErrorCode::kTrackingLimit, "tracking hit a joint limit", i};
        }
        traj.times.push_back(last == 0 ? 0.0 : static_cast<double>(i) / last);
        traj.samples.push_back(q);
    }
    return traj;
}

Result<JointTrajectory> differential_ik_track(const SerialArm& arm, const VecX& q0,
                                              const PosePath& path, int n_steps,
                                              const TrackTolerances& tol) {
    if (n_steps < 1) throw std::invalid_argument("differential_ik_track: n_steps < 1");
    std::vector<Transform> targets;
    targets.reserve(n_steps + 1);
    for (int i = 0; i <= n_steps; ++i)
        targets.push_back(path.at(static_cast<double>(i) / n_steps));
    return track_targets(arm, q0, targets, tol);
}

int default_track_steps(const PosePath& path, const MetricWeights& w) {
    const double len = w.rot_weight * path.rotation_angle() +
                       w.trans_weight * (path.end().translation - path.start().translation).norm();
    return std::max(1, static_cast<int>(std::ceil(len / 0.005)));
}

}  // namespace bimanip
