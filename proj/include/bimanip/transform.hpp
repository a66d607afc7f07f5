#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <stdexcept>

#include "bimanip/rng.hpp"

namespace bimanip {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

inline constexpr double kRotationTol = 1e-9;

// Element of SO(3), stored as a 3x3 matrix. Orthonormality and det = +1 are
// checked on construction (tolerance 1e-9 per entry), so downstream code can
// rely on inputs being valid group elements.
class Rotation {
public:
    Rotation() : m_(Mat3::Identity()) {}

    explicit Rotation(const Mat3& m) : m_(m) { validate(); }

    static Rotation identity() { return Rotation(); }

    static Rotation axis_angle(const Vec3& axis, double angle) {
        const double n = axis.norm();
        if (n < 1e-12) {
            if (std::abs(angle) < 1e-12) return identity();
            throw std::invalid_argument("Rotation::axis_angle: zero axis");
        }
        return Rotation(Eigen::AngleAxisd(angle, axis / n).toRotationMatrix(), Unchecked{});
    }

    static Rotation from_quaternion(const Eigen::Quaterniond& q) {
        return Rotation(q.normalized().toRotationMatrix(), Unchecked{});
    }

    static Rotation rot_x(double a) { return axis_angle(Vec3::UnitX(), a); }
    static Rotation rot_y(double a) { return axis_angle(Vec3::UnitY(), a); }
    static Rotation rot_z(double a) { return axis_angle(Vec3::UnitZ(), a); }

    const Mat3& matrix() const { return m_; }

    Eigen::Quaterniond quaternion() const { return Eigen::Quaterniond(m_); }

    Rotation inverse() const { return Rotation(m_.transpose(), Unchecked{}); }

    Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_, Unchecked{}); }

    Vec3 operator*(const Vec3& v) const { return m_ * v; }

    double angle_from_identity() const {
        const double c = std::clamp((m_.trace() - 1.0) / 2.0, -1.0, 1.0);
        return std::acos(c);
    }

private:
    struct Unchecked {};
    Rotation(const Mat3& m, Unchecked) : m_(m) {}

    void validate() const {
        const Mat3 err = m_.transpose() * m_ - Mat3::Identity();
        if (err.cwiseAbs().maxCoeff() > kRotationTol)
            throw std::invalid_argument("Rotation: matrix is not orthonormal");
        if (std::abs(m_.determinant() - 1.0) > kRotationTol)
            throw std::invalid_argument("Rotation: determinant is not +1");
    }

    Mat3 m_;
};

// Rigid-body pose: rotation plus translation in meters.
struct Transform {
    Rotation rotation;
    Vec3 translation = Vec3::Zero();

    static Transform identity() { return {}; }

    Transform operator*(const Transform& o) const {
        return {rotation * o.rotation, rotation * o.translation + translation};
    }

    Vec3 operator*(const Vec3& p) const { return rotation * p + translation; }

    Transform inverse() const {
        const Rotation ri = rotation.inverse();
        return {ri, -(ri * translation)};
    }
};

// c = (q1, q2, T): both arms' joint vectors plus the object pose.
struct CompositeConfig {
    VecX q1;
    VecX q2;
    Transform pose;
};

// Weights of the composite-configuration metric.
struct MetricWeights {
    double alpha = 0.5;
    double rot_weight = 1.0;   // per radian
    double trans_weight = 1.0; // per meter

    void validate() const {
        if (alpha < 0.0 || alpha > 1.0)
            throw std::invalid_argument("MetricWeights: alpha outside [0,1]");
        if (rot_weight < 0.0 || trans_weight < 0.0)
            throw std::invalid_argument("MetricWeights: negative weight");
    }
};

// Minimal geodesic angle between two rotations, in [0, pi].
double geodesic_distance(const Rotation& ra, const Rotation& rb);

// Weighted object-pose distance: rot_weight * geodesic + trans_weight * Euclidean.
double object_distance(const Transform& a, const Transform& b, const MetricWeights& w);

// Composite metric
//   d = alpha (|q1a - q1b| + |q2a - q2b|) + (1 - alpha) * object_distance.
// Throws on joint-vector dimension mismatch.
double composite_distance(const CompositeConfig& a, const CompositeConfig& b,
                          const MetricWeights& w);

// Interpolated rigid-body path on [0, 1]: constant-axis geodesic for the
// rotation, cubic with zero boundary velocity for the translation. When the
// relative rotation angle is pi the geodesic axis is ambiguous; it is then
// chosen deterministically (largest-magnitude component of the symmetric
// part, sign fixed) and the path is flagged degenerate.
class PosePath {
public:
    PosePath(const Transform& a, const Transform& b);

    Transform at(double s) const;

    const Transform& start() const { return start_; }
    const Transform& end() const { return end_; }
    double rotation_angle() const { return angle_; }
    bool degenerate_axis() const { return degenerate_; }

private:
    Transform start_;
    Transform end_;
    Vec3 axis_;       // body-frame rotation axis, unit length (or zero)
    double angle_ = 0.0;
    bool degenerate_ = false;
};

// Axis-aligned translation sampling box.
struct Aabb {
    Vec3 lo;
    Vec3 hi;
};

// Pose with rotation uniform on SO(3) (via uniform unit quaternions) and
// translation uniform in `bounds`. Deterministic given the generator state.
Transform sample_se3(const Aabb& bounds, Rng& rng);

}  // namespace bimanip
