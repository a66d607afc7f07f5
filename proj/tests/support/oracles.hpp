#pragma once

// Independently coded reference implementations used to cross-check the
// library. These deliberately use different formulations than the production
// code (quaternions instead of matrix traces, corner projection instead of
// radius-form SAT, product of exponentials instead of frame chaining).

#include <algorithm>
#include <cmath>
#include <vector>

#include "bimanip/kinematics.hpp"
#include "bimanip/reachability.hpp"
#include "bimanip/transform.hpp"

namespace oracles {

using namespace bimanip;

// Absolute-tolerance comparison, readable inside CHECK expansions.
inline bool near(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Geodesic rotation distance via unit quaternions: 2 atan2(|v|, |w|).
inline double quat_geodesic(const Rotation& a, const Rotation& b) {
    const Eigen::Quaterniond q = a.quaternion().conjugate() * b.quaternion();
    const double v = q.vec().norm();
    return 2.0 * std::atan2(v, std::abs(q.w()));
}

// Rodrigues rotation of a vector.
inline Vec3 rodrigues(const Vec3& axis, double angle, const Vec3& p) {
    const double c = std::cos(angle), s = std::sin(angle);
    return p * c + axis.cross(p) * s + axis * (axis.dot(p)) * (1.0 - c);
}

// Forward kinematics by the product of exponentials in the space frame:
// screws from the zero-configuration joint axes and positions.
inline Transform poe_fk(const SerialArm& arm, const VecX& q) {
    // Zero-configuration frames.
    std::vector<Transform> zero_frames;
    Transform f = arm.base;
    for (const RevoluteJoint& j : arm.joints) {
        f = f * j.origin;
        zero_frames.push_back(f);
    }
    const Transform m = f * arm.tool;  // home gripper pose

    // Apply exp([S_i] q_i) left to right.
    Transform g = Transform::identity();
    for (int i = 0; i < arm.dof(); ++i) {
        const Vec3 w = zero_frames[i].rotation * arm.joints[i].axis;
        const Vec3 p = zero_frames[i].translation;
        // Rotation about the axis line through p: x -> p + R (x - p).
        Transform e;
        e.rotation = Rotation::axis_angle(w, q[i]);
        e.translation = p - e.rotation * p;
        g = g * e;
    }
    return g * m;
}

// Central finite-difference geometric Jacobian, rows (angular; linear).
inline Mat6X fd_jacobian(const SerialArm& arm, const VecX& q, double h = 1e-6) {
    Mat6X j(6, arm.dof());
    for (int i = 0; i < arm.dof(); ++i) {
        VecX qp = q, qm = q;
        qp[i] += h;
        qm[i] -= h;
        const Transform fp = link_frames(arm, qp).back();
        const Transform fm = link_frames(arm, qm).back();
        // Angular velocity from the relative rotation of the two perturbed
        // frames, expressed in the world frame.
        const Eigen::AngleAxisd aa(fp.rotation.matrix() * fm.rotation.matrix().transpose());
        j.block<3, 1>(0, i) = aa.angle() * aa.axis() / (2.0 * h);
        j.block<3, 1>(3, i) = (fp.translation - fm.translation) / (2.0 * h);
    }
    return j;
}

// Upper regularized incomplete gamma Q(a, x), by series or continued
// fraction (Numerical Recipes style).
inline double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) return 1.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a, x) by series, return 1 - P.
        double ap = a, sum = 1.0 / a, del = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-14) break;
        }
        return 1.0 - sum * std::exp(-x + a * std::log(x) - gln);
    }
    // Q(a, x) by modified Lentz continued fraction.
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h2 = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h2 *= del;
        if (std::abs(del - 1.0) < 1e-14) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h2;
}

// Chi-square upper-tail p-value.
inline double chi_square_p(double stat, int dof) { return gamma_q(dof / 2.0, stat / 2.0); }

// OBB overlap by corner-projection SAT: project all 8 corners of each box on
// each of the 15 candidate axes and compare intervals. `eps` shrinks the
// overlap so resting contact does not count, matching the library convention.
inline bool obb_overlap_corners(const Obb& a, const Obb& b, double eps = 1e-5) {
    std::vector<Vec3> ca, cb;
    for (int sx : {-1, 1})
        for (int sy : {-1, 1})
            for (int sz : {-1, 1}) {
                ca.push_back(a.center + a.axes * Vec3(sx * a.half[0], sy * a.half[1],
                                                      sz * a.half[2]));
                cb.push_back(b.center + b.axes * Vec3(sx * b.half[0], sy * b.half[1],
                                                      sz * b.half[2]));
            }
    std::vector<Vec3> axes;
    for (int i = 0; i < 3; ++i) axes.push_back(a.axes.col(i));
    for (int i = 0; i < 3; ++i) axes.push_back(b.axes.col(i));
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const Vec3 c = a.axes.col(i).cross(b.axes.col(j));
            if (c.norm() > 1e-12) axes.push_back(c.normalized());
        }
    for (const Vec3& ax : axes) {
        double alo = 1e300, ahi = -1e300, blo = 1e300, bhi = -1e300;
        for (const Vec3& p : ca) {
            alo = std::min(alo, ax.dot(p));
            ahi = std::max(ahi, ax.dot(p));
        }
        for (const Vec3& p : cb) {
            blo = std::min(blo, ax.dot(p));
            bhi = std::max(bhi, ax.dot(p));
        }
        if (ahi <= blo + eps || bhi <= alo + eps) return false;
    }
    return true;
}

// 2D convex hull by gift wrapping (Jarvis march), CCW.
inline std::vector<Vec2> gift_wrap(std::vector<Vec2> pts) {
    // Deduplicate.
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) { return (a - b).norm() < 1e-9; }),
              pts.end());
    if (pts.size() < 3) return pts;
    std::vector<Vec2> hull;
    std::size_t start = 0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (pts[i].x() < pts[start].x() ||
            (pts[i].x() == pts[start].x() && pts[i].y() < pts[start].y()))
            start = i;
    std::size_t cur = start;
    do {
        hull.push_back(pts[cur]);
        std::size_t next = (cur + 1) % pts.size();
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i == cur) continue;
            const Vec2 a = pts[next] - pts[cur];
            const Vec2 b = pts[i] - pts[cur];
            const double cross = a.x() * b.y() - a.y() * b.x();
            if (cross > 1e-12 || (std::abs(cross) < 1e-12 && b.norm() > a.norm())) next = i;
        }
        cur = next;
    } while (cur != start && hull.size() <= pts.size());
    return hull;
}

// Connected-component labels of a placement grid occupancy by depth-first
// flood fill (explicit stack), same scan order as the library so labels are
// directly comparable.
inline std::vector<int> flood_fill_labels(const PlacementGrid& g) {
    std::vector<int> labels(g.occupancy.size(), -1);
    int next = 0;
    std::vector<std::array<int, 3>> stack;
    for (int ix = 0; ix < g.nx; ++ix) {
        for (int iy = 0; iy < g.ny; ++iy) {
            for (int it = 0; it < g.ntheta; ++it) {
                if (!g.occupancy[g.index(ix, iy, it)] || labels[g.index(ix, iy, it)] >= 0)
                    continue;
                const int label = next++;
                stack.push_back({ix, iy, it});
                labels[g.index(ix, iy, it)] = label;
                while (!stack.empty()) {
                    const auto [cx, cy, ct] = stack.back();
                    stack.pop_back();
                    const int mv[6][3] = {{1, 0, 0},  {-1, 0, 0}, {0, 1, 0},
                                          {0, -1, 0}, {0, 0, 1},  {0, 0, -1}};
                    for (const auto& m : mv) {
                        const int nx2 = cx + m[0], ny2 = cy + m[1];
                        int nt = (ct + m[2] + g.ntheta) % g.ntheta;
                        if (nx2 < 0 || nx2 >= g.nx || ny2 < 0 || ny2 >= g.ny) continue;
                        const int idx = g.index(nx2, ny2, nt);
                        if (!g.occupancy[idx] || labels[idx] >= 0) continue;
                        labels[idx] = label;
                        stack.push_back({nx2, ny2, nt});
                    }
                }
            }
        }
    }
    return labels;
}

}  // namespace oracles
