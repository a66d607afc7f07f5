#include "bimanip/trajectory.hpp"

#include <cmath>
#include <stdexcept>

namespace bimanip {

namespace {

double config_gap(const CompositeConfig& a, const CompositeConfig& b) {
    const double dq = (a.q1 - b.q1).lpNorm<Eigen::Infinity>() +
                      (a.q2 - b.q2).lpNorm<Eigen::Infinity>();
    const double dr = geodesic_distance(a.pose.rotation, b.pose.rotation);
    const double dt = (a.pose.translation - b.pose.translation).lpNorm<Eigen::Infinity>();
    return dq + dr + dt;
}

// Relative gripper pose drift against the segment's first sample.
double relative_drift(const Transform& ref, const Transform& cur) {
    const Transform d = ref.inverse() * cur;
    return d.rotation.angle_from_identity() + d.translation.norm();
}

CompositeConfig lerp_config(const CompositeConfig& a, const CompositeConfig& b, double s) {
    PosePath path(a.pose, b.pose);
    return {a.q1 + s * (b.q1 - a.q1), a.q2 + s * (b.q2 - a.q2), path.at(s)};
}

}  // namespace

CompositeConfig segment_start(const Segment& s) {
    return std::visit([](const auto& seg) { return seg.config_at(0); }, s);
}

CompositeConfig segment_end(const Segment& s) {
    return std::visit([](const auto& seg) { return seg.config_at(seg.size() - 1); }, s);
}

std::size_t segment_size(const Segment& s) {
    return std::visit([](const auto& seg) { return seg.size(); }, s);
}

int ManipulationTrajectory::transfer_count() const {
    int n = 0;
    for (const Segment& s : segments)
        if (std::holds_alternative<TransferSegment>(s)) ++n;
    return n;
}

CompositeConfig ManipulationTrajectory::start_config() const {
    if (segments.empty()) throw std::logic_error("start_config on empty trajectory");
    return segment_start(segments.front());
}

CompositeConfig ManipulationTrajectory::end_config() const {
    if (segments.empty()) throw std::logic_error("end_config on empty trajectory");
    return segment_end(segments.back());
}

double closed_chain_drift(const World& w, const TransferSegment& s) {
    if (s.size() == 0) return 0.0;
    const Transform ref1 =
        s.object_poses[0].inverse() * forward_kinematics(w.arms[0], s.arm1.samples[0]);
    const Transform ref2 =
        s.object_poses[0].inverse() * forward_kinematics(w.arms[1], s.arm2.samples[0]);
    double worst = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const Transform r1 =
            s.object_poses[i].inverse() * forward_kinematics(w.arms[0], s.arm1.samples[i]);
        const Transform r2 =
            s.object_poses[i].inverse() * forward_kinematics(w.arms[1], s.arm2.samples[i]);
        worst = std::max({worst, relative_drift(ref1, r1), relative_drift(ref2, r2)});
    }
    return worst;
}

double trajectory_length(const ManipulationTrajectory& t, const MetricWeights& w) {
    double len = 0.0;
    for (const Segment& seg : t.segments) {
        const std::size_t n = segment_size(seg);
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const CompositeConfig a =
                std::visit([&](const auto& s) { return s.config_at(i); }, seg);
            const CompositeConfig b =
                std::visit([&](const auto& s) { return s.config_at(i + 1); }, seg);
            len += composite_distance(a, b, w);
        }
    }
    return len;
}

Result<bool> validate_trajectory(const World& w, const ManipulationTrajectory& t,
                                 const ValidationParams& p) {
    for (std::size_t si = 0; si < t.segments.size(); ++si) {
        const Segment& seg = t.segments[si];
        const std::size_t n = segment_size(seg);
        if (n == 0)
            return Error{ErrorCode::kTrackingDiverged, "empty segment", static_cast<int>(si)};
        const bool transfer = std::holds_alternative<TransferSegment>(seg);

        // Checks at stored samples plus (subdivide - 1) interpolated points
        // between each consecutive pair.
        const std::size_t checks = (n - 1) * static_cast<std::size_t>(p.subdivide) + 1;
        for (std::size_t k = 0; k < checks; ++k) {
            const std::size_t i = k / p.subdivide;
            const int sub = static_cast<int>(k % p.subdivide);
            CompositeConfig c = std::visit([&](const auto& s) { return s.config_at(i); }, seg);
            if (sub != 0) {
                const CompositeConfig next =
                    std::visit([&](const auto& s) { return s.config_at(i + 1); }, seg);
                c = lerp_config(c, next, static_cast<double>(sub) / p.subdivide);
            }
            if (!w.arms[0].within_limits(c.q1) || !w.arms[1].within_limits(c.q2))
                return Error{ErrorCode::kTrackingLimit, "joint limit violated",
                             static_cast<int>(si)};
            if (is_singular(w.arms[0], c.q1) || is_singular(w.arms[1], c.q2))
                return Error{ErrorCode::kSingular, "singular configuration",
                             static_cast<int>(si)};
            if (!check_collision_free(w, c, transfer))
                return Error{ErrorCode::kCollision, "collision along segment",
                             static_cast<int>(si)};
            if (transfer) {
                const auto& ts = std::get<TransferSegment>(seg);
                if (p.check_equilibrium && sub == 0) {
                    Result<bool> eq = check_static_equilibrium(
                        w.object, w.gripper, c.pose, ts.grasp, w.gravity, w.friction,
                        w.cone_edges);
                    if (!eq.ok()) return eq.error();
                    if (!eq.value())
                        return Error{ErrorCode::kInfeasible, "grasp equilibrium infeasible",
                                     static_cast<int>(si)};
                }
            } else if (p.check_placement && sub == 0) {
                Result<PlacementCoord> pc = classify_placement(w, c.pose);
                if (!pc.ok()) return pc.error();
                if (!w.placement(pc.value().class_id).stable)
                    return Error{ErrorCode::kTilted, "transit at unstable placement",
                                 static_cast<int>(si)};
            }
        }

        if (transfer) {
            const double drift = closed_chain_drift(w, std::get<TransferSegment>(seg));
            if (drift > p.chain_tol)
                return Error{ErrorCode::kTrackingDiverged, "closed-chain drift exceeds bound",
                             static_cast<int>(si), drift};
        }

        if (si > 0) {
            const double gap = config_gap(segment_end(t.segments[si - 1]), segment_start(seg));
            if (gap > p.continuity_tol)
                return Error{ErrorCode::kTrackingDiverged, "segment boundary mismatch",
                             static_cast<int>(si), gap};
        }
    }
    return true;
}

}  // namespace bimanip
