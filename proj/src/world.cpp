#include "bimanip/world.hpp"

#include <algorithm>
#include <cmath>

namespace bimanip {

namespace {
constexpr double kPlaneTol = 1e-6;
constexpr double kFlushAngleTol = 1e-4;   // rad
constexpr double kFlushHeightTol = 1e-4;  // m
constexpr double kStabilityMargin = 1e-4; // m
}  // namespace

void ObjectModel::validate() const {
    if (links.empty()) throw std::invalid_argument("ObjectModel: no links");
    if (mass <= 0.0) throw std::invalid_argument("ObjectModel: mass must be positive");
    for (const auto& l : links)
        if (l.half.minCoeff() <= 0.0)
            throw std::invalid_argument("ObjectModel: non-positive half extent");
}

std::vector<Vec3> ObjectModel::vertices() const {
    std::vector<Vec3> out;
    out.reserve(links.size() * 8);
    for (const auto& l : links) {
        for (int sx : {-1, 1})
            for (int sy : {-1, 1})
                for (int sz : {-1, 1})
                    out.push_back(l.frame * Vec3(sx * l.half.x(), sy * l.half.y(),
                                                 sz * l.half.z()));
    }
    return out;
}

Mat3 PlacementClass::face_frame() const {
    // Deterministic in-plane axes: start from the world axis least aligned
    // with the normal (lowest index on ties).
    int best = 0;
    double best_dot = 2.0;
    for (int i = 0; i < 3; ++i) {
        const double d = std::abs(normal[i]);
        if (d < best_dot - 1e-12) {
            best_dot = d;
            best = i;
        }
    }
    const Vec3 e = Vec3::Unit(best);
    const Vec3 u = (e - e.dot(normal) * normal).normalized();
    const Vec3 v = normal.cross(u);
    Mat3 f;
    f.col(0) = u;
    f.col(1) = v;
    f.col(2) = normal;
    return f;
}

BoxShape SupportSurface::slab() const {
    BoxShape s;
    s.frame = frame * Transform{Rotation::identity(), Vec3(0, 0, -thickness / 2.0)};
    s.half = Vec3(half_extents.x(), half_extents.y(), thickness / 2.0);
    return s;
}

namespace {

// 2D convex hull (monotone chain), CCW, duplicates removed.
std::vector<Vec2> hull_2d(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
        return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
    });
    pts.erase(std::unique(pts.begin(), pts.end(),
                          [](const Vec2& a, const Vec2& b) {
                              return (a - b).norm() < 1e-9;
                          }),
              pts.end());
    const auto cross = [](const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    };
    if (pts.size() < 3) return pts;
    std::vector<Vec2> h(2 * pts.size());
    std::size_t k = 0;
    for (const auto& p : pts) {
        while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 1e-12) --k;
        h[k++] = p;
    }
    const std::size_t lower = k + 1;
    for (auto it = pts.rbegin() + 1; it != pts.rend(); ++it) {
        while (k >= lower && cross(h[k - 2], h[k - 1], *it) <= 1e-12) --k;
        h[k++] = *it;
    }
    h.resize(k - 1);
    return h;
}

bool point_in_convex_polygon(const std::vector<Vec2>& poly, const Vec2& p, double margin) {
    if (poly.size() < 3) return false;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        const Vec2 e = b - a;
        const double len = e.norm();
        if (len < 1e-12) continue;
        const double inward = (e.x() * (p.y() - a.y()) - e.y() * (p.x() - a.x())) / len;
        if (inward < margin) return false;
    }
    return true;
}

struct CandidatePlane {
    Vec3 n;
    double d;
};

}  // namespace

std::vector<PlacementClass> convex_hull_placements(const ObjectModel& object) {
    object.validate();
    const std::vector<Vec3> pts = object.vertices();
    const int n = static_cast<int>(pts.size());

    // Degeneracy check: points must span three dimensions.
    {
        Vec3 mean = Vec3::Zero();
        for (const auto& p : pts) mean += p;
        mean /= n;
        Mat3 cov = Mat3::Zero();
        for (const auto& p : pts) cov += (p - mean) * (p - mean).transpose();
        Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
        if (es.eigenvalues()(0) < 1e-12)
            throw std::invalid_argument("convex_hull_placements: degenerate (flat) hull");
    }

    // Supporting planes from all point triples. The point set is tiny
    // (8 per link), so the quartic scan is cheap and robust.
    std::vector<CandidatePlane> planes;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            for (int k = j + 1; k < n; ++k) {
                Vec3 nv = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
                const double nn = nv.norm();
                if (nn < 1e-12) continue;
                nv /= nn;
                double d = nv.dot(pts[i]);
                double lo = d, hi = d;
                for (const auto& p : pts) {
                    const double v = nv.dot(p);
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
                Vec3 cn;
                double cd;
                if (hi - d < kPlaneTol) {
                    cn = nv;
                    cd = hi;
                } else if (d - lo < kPlaneTol) {
                    cn = -nv;
                    cd = -lo;
                } else {
                    continue;
                }
                bool known = false;
                for (const auto& pl : planes) {
                    if ((pl.n - cn).norm() < kPlaneTol && std::abs(pl.d - cd) < kPlaneTol) {
                        known = true;
                        break;
                    }
                }
                if (!known) planes.push_back({cn, cd});
            }
        }
    }

    std::vector<PlacementClass> classes;
    for (const auto& pl : planes) {
        PlacementClass c;
        c.normal = pl.n;
        c.offset = pl.d;
        // Collect on-plane vertices, reduce to the face polygon.
        Mat3 f;
        {
            PlacementClass tmp;
            tmp.normal = pl.n;
            f = tmp.face_frame();
        }
        std::vector<Vec2> pts2;
        for (const auto& p : pts)
            if (std::abs(pl.n.dot(p) - pl.d) < kPlaneTol)
                pts2.emplace_back(f.col(0).dot(p), f.col(1).dot(p));
        const auto poly2 = hull_2d(pts2);
        if (poly2.size() < 3) continue;
        for (const auto& p2 : poly2)
            c.polygon.push_back(p2.x() * f.col(0) + p2.y() * f.col(1) + pl.d * pl.n);
        const Vec2 com2(f.col(0).dot(object.center_of_mass), f.col(1).dot(object.center_of_mass));
        c.stable = point_in_convex_polygon(poly2, com2, kStabilityMargin);
        classes.push_back(std::move(c));
    }

    // Deterministic ids: sort by normal, then offset.
    std::sort(classes.begin(), classes.end(), [](const PlacementClass& a, const PlacementClass& b) {
        for (int i = 0; i < 3; ++i) {
            if (std::abs(a.normal[i] - b.normal[i]) > 1e-9) return a.normal[i] < b.normal[i];
        }
        return a.offset < b.offset;
    });
    for (std::size_t i = 0; i < classes.size(); ++i) classes[i].id = static_cast<int>(i);
    return classes;
}

void World::validate() const {
    if (arms.size() != 2) throw std::invalid_argument("World: exactly two arms required");
    if (surfaces.empty()) throw std::invalid_argument("World: at least one support surface");
    for (const auto& a : arms) a.validate();
    object.validate();
    metric.validate();
}

void World::finalize() {
    validate();
    placements = convex_hull_placements(object);
}

const PlacementClass& World::placement(int class_id) const {
    if (class_id < 0 || class_id >= static_cast<int>(placements.size()))
        throw std::invalid_argument("World: unknown placement class");
    return placements[static_cast<std::size_t>(class_id)];
}

namespace {

// Rotation taking the object frame to the canonical face-down orientation:
// face normal to -z, face u axis to +x.
Mat3 face_down_basis(const PlacementClass& c) {
    const Mat3 f = c.face_frame();
    Mat3 b;
    b.row(0) = f.col(0).transpose();
    b.row(1) = -(f.col(2).cross(f.col(0))).transpose();
    b.row(2) = -f.col(2).transpose();
    return b;
}

double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * M_PI);
    if (a < 0.0) a += 2.0 * M_PI;
    if (a >= 2.0 * M_PI - 1e-15) a = 0.0;
    return a;
}

}  // namespace

Transform placement_to_transform(const World& w, const PlacementCoord& p) {
    const PlacementClass& c = w.placement(p.class_id);
    const SupportSurface& s = w.surfaces.front();
    const Mat3 b = face_down_basis(c);
    Transform t;
    t.rotation = s.frame.rotation * Rotation::rot_z(p.theta) * Rotation(b);
    t.translation = s.frame * Vec3(p.x, p.y, c.offset);
    return t;
}

Result<PlacementCoord> classify_placement(const World& w, const Transform& pose) {
    const auto verts = w.object.vertices();
    bool touching = false;
    for (const auto& s : w.surfaces) {
        const Transform inv = s.frame.inverse();
        // Object pose in the surface frame.
        const Transform local = inv * pose;
        double min_z = std::numeric_limits<double>::infinity();
        for (const auto& v : verts) min_z = std::min(min_z, (local * v).z());
        if (min_z > kFlushHeightTol) continue;  // above this surface
        touching = true;
        for (const auto& c : w.placements) {
            const Vec3 wn = local.rotation * c.normal;
            if (std::acos(std::clamp(-wn.z(), -1.0, 1.0)) > kFlushAngleTol) continue;
            bool flush = true;
            for (const auto& fv : c.polygon) {
                if (std::abs((local * fv).z()) > kFlushHeightTol) {
                    flush = false;
                    break;
                }
            }
            if (!flush) continue;
            const Vec3 origin = local.translation;
            if (std::abs(origin.x()) > s.half_extents.x() ||
                std::abs(origin.y()) > s.half_extents.y())
                continue;
            // Recover theta from R_local = Rz(theta) * B.
            const Mat3 rz = local.rotation.matrix() * face_down_basis(c).transpose();
            PlacementCoord out;
            out.class_id = c.id;
            out.x = origin.x();
            out.y = origin.y();
            out.theta = normalize_angle(std::atan2(rz(1, 0), rz(0, 0)));
            return out;
        }
    }
    if (!touching) return Error{ErrorCode::kNoContact, "object not resting on any surface"};
    return Error{ErrorCode::kTilted, "object touches a surface but no hull face is flush"};
}

namespace {

struct WorldBoxes {
    // Body ids: arm a link i -> (a, i); object -> (2, 0); statics -> (3, k).
    struct Entry {
        Obb obb;
        AabbBound bound;
        int group;  // 0,1 = arms, 2 = object, 3 = static
        int body;
    };
    std::vector<Entry> entries;

    void add(const Obb& o, int group, int body) {
        entries.push_back({o, obb_bounds(o), group, body});
    }
};

}  // namespace

bool check_collision_free(const World& w, const CompositeConfig& c, bool grasp_active) {
    WorldBoxes boxes;
    const VecX* qs[2] = {&c.q1, &c.q2};
    for (int a = 0; a < 2; ++a) {
        const auto frames = link_frames(w.arms[a], *qs[a]);
        const auto& shapes = w.arms[a].link_shapes;
        for (std::size_t i = 0; i < shapes.size(); ++i)
            for (const auto& s : shapes[i]) boxes.add(make_obb(frames[i], s), a, static_cast<int>(i));
    }
    const int gripper_body[2] = {w.arms[0].dof() + 1, w.arms[1].dof() + 1};
    for (const auto& l : w.object.links) boxes.add(make_obb(c.pose, l), 2, 0);
    for (const auto& o : w.obstacles) boxes.add(make_obb(Transform::identity(), o), 3, 0);
    for (const auto& s : w.surfaces) boxes.add(make_obb(Transform::identity(), s.slab()), 3, 1);

    const auto& e = boxes.entries;
    for (std::size_t i = 0; i < e.size(); ++i) {
        for (std::size_t j = i + 1; j < e.size(); ++j) {
            const auto& a = e[i];
            const auto& b = e[j];
            if (a.group == 3 && b.group == 3) continue;  // static scene layout
            if (a.group == b.group) {
                if (a.group >= 2) continue;  // object links / statics never self-collide
                if (std::abs(a.body - b.body) <= 1) continue;  // adjacent links
            }
            if (grasp_active) {
                const bool ag = a.group < 2 && a.body == gripper_body[a.group];
                const bool bg = b.group < 2 && b.body == gripper_body[b.group];
                if ((ag && b.group == 2) || (bg && a.group == 2)) continue;
            }
            if (!aabb_overlap(a.bound, b.bound, 1e-5)) continue;
            if (obb_overlap(a.obb, b.obb)) return false;
        }
    }
    return true;
}

bool object_collision_free(const World& w, const Transform& pose) {
    std::vector<Obb> object_boxes;
    for (const auto& l : w.object.links) object_boxes.push_back(make_obb(pose, l));
    for (const auto& ob : object_boxes) {
        for (const auto& o : w.obstacles)
            if (obb_overlap(ob, make_obb(Transform::identity(), o))) return false;
        for (const auto& s : w.surfaces)
            if (obb_overlap(ob, make_obb(Transform::identity(), s.slab()))) return false;
    }
    return true;
}

}  // namespace bimanip
