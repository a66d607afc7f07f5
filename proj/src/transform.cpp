#include "bimanip/transform.hpp"

#include <cmath>

namespace bimanip {

double geodesic_distance(const Rotation& ra, const Rotation& rb) {
    const double c = std::clamp(((ra.matrix().transpose() * rb.matrix()).trace() - 1.0) / 2.0,
                                -1.0, 1.0);
    return std::acos(c);
}

double object_distance(const Transform& a, const Transform& b, const MetricWeights& w) {
    return w.rot_weight * geodesic_distance(a.rotation, b.rotation) +
           w.trans_weight * (a.translation - b.translation).norm();
}

double composite_distance(const CompositeConfig& a, const CompositeConfig& b,
                          const MetricWeights& w) {
    w.validate();
    if (a.q1.size() != b.q1.size() || a.q2.size() != b.q2.size())
        throw std::invalid_argument("composite_distance: joint vector dimension mismatch");
    const double joints = (a.q1 - b.q1).norm() + (a.q2 - b.q2).norm();
    return w.alpha * joints + (1.0 - w.alpha) * object_distance(a.pose, b.pose, w);
}

namespace {

// Axis of a rotation whose angle is exactly pi, recovered from the symmetric
// part: (R + I)/2 = a a^T. The sign of the largest-magnitude component is
// fixed positive so the choice is deterministic.
Vec3 pi_rotation_axis(const Mat3& r) {
    const Mat3 m = 0.5 * (r + Mat3::Identity());
    int k = 0;
    m.diagonal().maxCoeff(&k);
    Vec3 a;
    a[k] = std::sqrt(std::max(m(k, k), 0.0));
    for (int i = 0; i < 3; ++i) {
        if (i == k) continue;
        a[i] = m(k, i) / a[k];
    }
    return a.normalized();
}

}  // namespace

PosePath::PosePath(const Transform& a, const Transform& b) : start_(a), end_(b) {
    const Mat3 rel = a.rotation.matrix().transpose() * b.rotation.matrix();
    const double c = std::clamp((rel.trace() - 1.0) / 2.0, -1.0, 1.0);
    angle_ = std::acos(c);
    if (angle_ > M_PI - 1e-9) {
        axis_ = pi_rotation_axis(rel);
        angle_ = M_PI;
        degenerate_ = true;
    } else {
        const Vec3 v(rel(2, 1) - rel(1, 2), rel(0, 2) - rel(2, 0), rel(1, 0) - rel(0, 1));
        const double n = v.norm();
        if (n < 1e-9) {
            // Numerically the identity: the trace-based angle is pure noise at
            // this scale (sqrt(eps)), while n bounds the true angle by n / 2.
            axis_ = Vec3::Zero();
            angle_ = 0.0;
        } else {
            axis_ = v / n;
            angle_ = std::atan2(n / 2.0, (rel.trace() - 1.0) / 2.0);
        }
    }
}

Transform PosePath::at(double s) const {
    if (s <= 0.0) return start_;
    if (s >= 1.0) return end_;
    Transform out;
    if (angle_ == 0.0) {
        out.rotation = start_.rotation;
    } else {
        out.rotation = start_.rotation * Rotation::axis_angle(axis_, s * angle_);
    }
    const double blend = s * s * (3.0 - 2.0 * s);
    out.translation = start_.translation + blend * (end_.translation - start_.translation);
    return out;
}

Transform sample_se3(const Aabb& bounds, Rng& rng) {
    if ((bounds.hi - bounds.lo).minCoeff() < 0.0)
        throw std::invalid_argument("sample_se3: empty bounds");
    // Shoemake's subgroup method: uniform unit quaternion from three uniforms.
    const double u1 = rng.uniform();
    const double u2 = rng.uniform();
    const double u3 = rng.uniform();
    const double s1 = std::sqrt(1.0 - u1);
    const double s2 = std::sqrt(u1);
    const Eigen::Quaterniond q(s2 * std::cos(2.0 * M_PI * u3),
                               s1 * std::sin(2.0 * M_PI * u2),
                               s1 * std::cos(2.0 * M_PI * u2),
                               s2 * std::sin(2.0 * M_PI * u3));
    Transform t;
    t.rotation = Rotation::from_quaternion(q);
    for (int i = 0; i < 3; ++i) t.translation[i] = rng.uniform(bounds.lo[i], bounds.hi[i]);
    return t;
}

}  // namespace bimanip
