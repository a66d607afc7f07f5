#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bimanip/world.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace bimanip;
using oracles::near;

namespace {

Obb random_obb(Rng& rng) {
    const Transform t = sample_se3({Vec3(-0.2, -0.2, -0.2), Vec3(0.2, 0.2, 0.2)}, rng);
    Obb o;
    o.axes = t.rotation.matrix();
    o.center = t.translation;
    for (int i = 0; i < 3; ++i) o.half[i] = rng.uniform(0.02, 0.15);
    return o;
}

}  // namespace

TEST_CASE("obb separating-axis test agrees with the corner-projection oracle") {
    Rng rng(3);
    int hits = 0;
    for (int i = 0; i < 500; ++i) {
        const Obb a = random_obb(rng);
        const Obb b = random_obb(rng);
        const bool got = obb_overlap(a, b);
        CHECK(got == oracles::obb_overlap_corners(a, b));
        if (got) ++hits;
    }
    // The sample must exercise both outcomes to mean anything.
    CHECK(hits > 50);
    CHECK(hits < 450);
}

TEST_CASE("resting contact within the tolerance does not count as overlap") {
    Obb a, b;
    a.half = Vec3(0.1, 0.1, 0.1);
    b.half = Vec3(0.1, 0.1, 0.1);

    b.center = Vec3(0, 0, 0.2);  // exact face contact
    CHECK_FALSE(obb_overlap(a, b));
    b.center = Vec3(0, 0, 0.2 - 2e-6);  // shallower than the 1e-5 tolerance
    CHECK_FALSE(obb_overlap(a, b));
    b.center = Vec3(0, 0, 0.2 - 1e-3);  // genuine penetration
    CHECK(obb_overlap(a, b));
    b.center = Vec3(0, 0, 0.25);  // separated
    CHECK_FALSE(obb_overlap(a, b));
}

TEST_CASE("obb bounds contain every corner") {
    Rng rng(7);
    for (int i = 0; i < 100; ++i) {
        const Obb o = random_obb(rng);
        const AabbBound bound = obb_bounds(o);
        for (int sx : {-1, 1})
            for (int sy : {-1, 1})
                for (int sz : {-1, 1}) {
                    const Vec3 c = o.center + o.axes * Vec3(sx * o.half[0], sy * o.half[1],
                                                            sz * o.half[2]);
                    for (int k = 0; k < 3; ++k) {
                        CHECK(c[k] >= bound.lo[k] - 1e-12);
                        CHECK(c[k] <= bound.hi[k] + 1e-12);
                    }
                }
    }
}

TEST_CASE("a cuboid has six stable placement classes") {
    const ObjectModel box = fixtures::unit_box(0.5);
    const auto classes = convex_hull_placements(box);
    REQUIRE(classes.size() == 6);

    int axis_hits[6] = {0};
    for (const auto& c : classes) {
        CHECK(c.stable);
        CHECK(near(c.normal.norm(), 1.0, 1e-12));
        CHECK(near(c.offset, 0.5, 1e-9));
        CHECK(c.polygon.size() == 4);
        // Each normal is one of the +-axis directions.
        for (int k = 0; k < 3; ++k) {
            if (near(c.normal[k], 1.0, 1e-9)) axis_hits[k]++;
            if (near(c.normal[k], -1.0, 1e-9)) axis_hits[3 + k]++;
        }
        // Face frame is a right-handed orthonormal basis with the normal last.
        const Mat3 f = c.face_frame();
        CHECK((f.transpose() * f - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(near(f.determinant(), 1.0, 1e-9));
        CHECK((f.col(2) - c.normal).norm() < 1e-9);
        // Every polygon vertex lies on the face plane.
        for (const Vec3& v : c.polygon) CHECK(near(c.normal.dot(v), c.offset, 1e-9));
    }
    for (int k = 0; k < 6; ++k) CHECK(axis_hits[k] == 1);
}

TEST_CASE("stability follows the center-of-mass projection") {
    // Shifting the COM far past the +-x footprint leaves only the +-x resting
    // faces stable (their footprints still contain the projected COM).
    ObjectModel box = fixtures::unit_box(0.05);
    box.center_of_mass = Vec3(0.2, 0.0, 0.0);
    const auto classes = convex_hull_placements(box);
    REQUIRE(classes.size() == 6);
    int stable = 0;
    for (const auto& c : classes) {
        const bool x_face = std::abs(c.normal[0]) > 0.5;
        CHECK(c.stable == x_face);
        if (c.stable) ++stable;
    }
    CHECK(stable == 2);
}

TEST_CASE("placement coordinates round-trip through the pose") {
    const World& w = fixtures::desk_box();
    REQUIRE(w.placements.size() == 6);
    Rng rng(13);
    for (const auto& c : w.placements) {
        for (int i = 0; i < 10; ++i) {
            PlacementCoord p;
            p.class_id = c.id;
            p.x = rng.uniform(-0.2, 0.2);
            p.y = rng.uniform(-0.2, 0.2);
            p.theta = rng.uniform(0.0, 2.0 * M_PI);
            const Transform pose = placement_to_transform(w, p);
            const auto back = classify_placement(w, pose);
            REQUIRE(back.ok());
            CHECK(back.value().class_id == p.class_id);
            CHECK(near(back.value().x, p.x, 1e-9));
            CHECK(near(back.value().y, p.y, 1e-9));
            // theta is normalized to [0, 2 pi).
            double dt = std::fmod(std::abs(back.value().theta - p.theta), 2.0 * M_PI);
            dt = std::min(dt, 2.0 * M_PI - dt);
            CHECK(near(dt, 0.0, 1e-9));
        }
    }
}

TEST_CASE("classification reports floating and tilted poses") {
    const World& w = fixtures::desk_box();
    Transform floating = placement_to_transform(w, {0, 0, 0, 0});
    floating.translation[2] += 0.05;
    auto r = classify_placement(w, floating);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().code == ErrorCode::kNoContact);

    // Tilt about a bottom edge so the object still touches the surface.
    const Transform flat = placement_to_transform(w, {0, 0, 0, 0});
    Transform tilted = flat;
    tilted.rotation = Rotation::rot_x(0.2) * flat.rotation;
    tilted.translation[2] += 0.02;  // keep it near the table without burying it
    auto r2 = classify_placement(w, tilted);
    REQUIRE_FALSE(r2.ok());
    CHECK((r2.error().code == ErrorCode::kTilted ||
           r2.error().code == ErrorCode::kNoContact));
}

TEST_CASE("object collision query sees the support slab") {
    const World& w = fixtures::desk_box();
    const Transform resting = placement_to_transform(w, {0, 0, 0, 0});
    CHECK(object_collision_free(w, resting));

    Transform buried = resting;
    buried.translation[2] -= 0.01;
    CHECK_FALSE(object_collision_free(w, buried));

    Transform outside = resting;
    outside.translation += Vec3(2.0, 2.0, 0.5);  // far from everything
    CHECK(object_collision_free(w, outside));
}

TEST_CASE("composite collision query covers arms, object and table") {
    const World& w = fixtures::desk_box();
    CompositeConfig c{w.arms[0].home, w.arms[1].home,
                      placement_to_transform(w, {0, 0, 0, 0})};
    CHECK(check_collision_free(w, c, false));

    // Driving the shoulder down rams arm 1 into the pedestal or table.
    CompositeConfig bad = c;
    bad.q1[1] = w.arms[0].joints[1].hi;
    bad.q1[2] = w.arms[0].joints[2].hi;
    CHECK_FALSE(check_collision_free(w, bad, false));
}

TEST_CASE("support slab sits below the resting plane") {
    const World& w = fixtures::desk_box();
    const SupportSurface& s = w.surfaces[0];
    const BoxShape slab = s.slab();
    CHECK(near(slab.half[0], s.half_extents[0], 1e-12));
    CHECK(near(slab.half[1], s.half_extents[1], 1e-12));
    CHECK(near(slab.half[2], s.thickness / 2.0, 1e-12));
    // Slab center is half a thickness below the plane in the surface frame.
    const Vec3 local = s.frame.inverse() * (s.frame * slab.frame.translation);
    CHECK(near(local[2], -s.thickness / 2.0, 1e-12));
}
