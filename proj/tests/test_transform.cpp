#include <doctest.h>

#include <cmath>

#include "bimanip/transform.hpp"
#include "support/oracles.hpp"

using namespace bimanip;
using oracles::near;

namespace {

Rotation random_rotation(Rng& rng) {
    return sample_se3({Vec3::Zero(), Vec3::Zero()}, rng).rotation;
}

}  // namespace

TEST_CASE("rotation construction validates group membership") {
    Mat3 bad = Mat3::Identity();
    bad(0, 1) = 0.01;
    CHECK_THROWS_AS(Rotation{bad}, std::invalid_argument);

    Mat3 reflection = Mat3::Identity();
    reflection(2, 2) = -1.0;
    CHECK_THROWS_AS(Rotation{reflection}, std::invalid_argument);

    CHECK_THROWS_AS(Rotation::axis_angle(Vec3::Zero(), 0.5), std::invalid_argument);
    CHECK(Rotation::axis_angle(Vec3::Zero(), 0.0).angle_from_identity() == 0.0);

    // Non-unit axes are normalized.
    const Rotation r = Rotation::axis_angle(Vec3(0, 0, 10), 0.7);
    CHECK(r.matrix().isApprox(Rotation::rot_z(0.7).matrix(), 1e-14));
}

TEST_CASE("rotation algebra round-trips") {
    Rng rng(11);
    for (int i = 0; i < 50; ++i) {
        const Rotation r = random_rotation(rng);
        // The trace-based angle saturates at sqrt(machine eps) near identity.
        CHECK((r * r.inverse()).angle_from_identity() < 1e-7);
        CHECK(Rotation::from_quaternion(r.quaternion()).matrix().isApprox(r.matrix(), 1e-12));
    }
}

TEST_CASE("geodesic distance matches the quaternion oracle") {
    Rng rng(23);
    for (int i = 0; i < 200; ++i) {
        const Rotation a = random_rotation(rng);
        const Rotation b = random_rotation(rng);
        const double d = geodesic_distance(a, b);
        CHECK(d >= 0.0);
        CHECK(d <= M_PI + 1e-12);
        // acos of the trace loses precision near 0 and pi; the quaternion
        // form does not, so compare with a tolerance sized for that loss.
        CHECK(near(d, oracles::quat_geodesic(a, b), 1e-6));
        CHECK(near(geodesic_distance(b, a), d, 1e-12));
        CHECK(near(geodesic_distance(a, a), 0.0, 1e-7));
    }
}

TEST_CASE("geodesic distance satisfies the triangle inequality") {
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        const Rotation a = random_rotation(rng);
        const Rotation b = random_rotation(rng);
        const Rotation c = random_rotation(rng);
        CHECK(geodesic_distance(a, c) <=
              geodesic_distance(a, b) + geodesic_distance(b, c) + 1e-9);
    }
}

TEST_CASE("composite distance is a weighted metric") {
    MetricWeights w;
    w.alpha = 0.3;
    w.rot_weight = 2.0;
    w.trans_weight = 1.5;

    CompositeConfig a{VecX::Zero(6), VecX::Zero(6), Transform::identity()};
    CompositeConfig b = a;
    b.q1[2] = 1.0;
    b.pose.translation = Vec3(2, 0, 0);
    b.pose.rotation = Rotation::rot_x(0.5);

    // Hand-computed: alpha * (1 + 0) + (1 - alpha) * (2 * 0.5 + 1.5 * 2).
    const double expected = 0.3 * 1.0 + 0.7 * (2.0 * 0.5 + 1.5 * 2.0);
    CHECK(near(composite_distance(a, b, w), expected, 1e-12));
    CHECK(near(composite_distance(b, a, w), expected, 1e-12));
    CHECK(near(composite_distance(a, a, w), 0.0, 1e-12));

    CompositeConfig short_q{VecX::Zero(5), VecX::Zero(6), Transform::identity()};
    CHECK_THROWS_AS(composite_distance(a, short_q, w), std::invalid_argument);

    MetricWeights bad = w;
    bad.alpha = 1.5;
    CHECK_THROWS_AS(composite_distance(a, b, bad), std::invalid_argument);
}

TEST_CASE("composite distance triangle inequality on random configs") {
    Rng rng(101);
    MetricWeights w;
    w.alpha = 0.4;
    const Aabb box{Vec3(-1, -1, -1), Vec3(1, 1, 1)};
    auto random_config = [&] {
        CompositeConfig c;
        c.q1 = VecX::NullaryExpr(6, [&](int) { return rng.uniform(-2.0, 2.0); });
        c.q2 = VecX::NullaryExpr(6, [&](int) { return rng.uniform(-2.0, 2.0); });
        c.pose = sample_se3(box, rng);
        return c;
    };
    for (int i = 0; i < 200; ++i) {
        const CompositeConfig a = random_config(), b = random_config(), c = random_config();
        CHECK(composite_distance(a, c, w) <=
              composite_distance(a, b, w) + composite_distance(b, c, w) + 1e-9);
    }
}

TEST_CASE("pose path interpolates a constant-axis geodesic") {
    Transform a, b;
    a.translation = Vec3(0, 0, 0.1);
    a.rotation = Rotation::rot_z(0.2);
    b.translation = Vec3(0.3, -0.1, 0.4);
    b.rotation = Rotation::rot_z(0.2) * Rotation::rot_y(1.2);

    const PosePath p(a, b);
    CHECK(near(p.rotation_angle(), 1.2, 1e-12));
    CHECK_FALSE(p.degenerate_axis());

    // Exact endpoints.
    CHECK(p.at(0.0).translation.isApprox(a.translation, 1e-15));
    CHECK(p.at(1.0).translation.isApprox(b.translation, 1e-15));
    CHECK(geodesic_distance(p.at(0.0).rotation, a.rotation) < 1e-12);
    CHECK(geodesic_distance(p.at(1.0).rotation, b.rotation) < 1e-12);

    // Midpoint rotation is equidistant from both ends along the geodesic.
    const Rotation mid = p.at(0.5).rotation;
    CHECK(near(geodesic_distance(a.rotation, mid), 0.6, 1e-9));
    CHECK(near(geodesic_distance(mid, b.rotation), 0.6, 1e-9));

    // Translation blend is a cubic with zero boundary velocity: the first 1%
    // of the parameter moves the point by O(s^2), not O(s).
    const double d01 = (p.at(0.01).translation - a.translation).norm();
    CHECK(d01 < 0.01 * (b.translation - a.translation).norm());
}

TEST_CASE("pose path handles the half-turn and identity corner cases") {
    Transform a;
    Transform b = a;
    b.rotation = Rotation::rot_x(M_PI);
    const PosePath p(a, b);
    CHECK(p.degenerate_axis());
    CHECK(near(p.rotation_angle(), M_PI, 1e-12));
    // The interpolant still lands on both endpoints and stays a valid group
    // element in between.
    CHECK(geodesic_distance(p.at(1.0).rotation, b.rotation) < 1e-9);
    CHECK(near(geodesic_distance(p.at(0.5).rotation, a.rotation), M_PI / 2, 1e-9));

    // Numerically near-identical rotations must not produce a spurious axis.
    Transform c = a;
    c.rotation = Rotation(Mat3(Rotation::rot_z(1e-13).matrix()));
    const PosePath q(a, c);
    CHECK(q.rotation_angle() < 1e-9);
    for (double s : {0.0, 0.3, 0.7, 1.0}) CHECK_NOTHROW(q.at(s));
}

TEST_CASE("se3 sampling is deterministic and respects bounds") {
    const Aabb bounds{Vec3(-1, 0, 2), Vec3(1, 0.5, 3)};
    Rng r1(77), r2(77);
    for (int i = 0; i < 100; ++i) {
        const Transform a = sample_se3(bounds, r1);
        const Transform b = sample_se3(bounds, r2);
        CHECK(a.translation == b.translation);  // bit-identical
        CHECK(a.rotation.matrix() == b.rotation.matrix());
        for (int k = 0; k < 3; ++k) {
            CHECK(a.translation[k] >= bounds.lo[k]);
            CHECK(a.translation[k] <= bounds.hi[k]);
        }
    }
    CHECK_THROWS_AS(sample_se3({Vec3::Ones(), Vec3::Zero()}, r1), std::invalid_argument);
}

TEST_CASE("sampled rotation angles follow the uniform-SO3 density") {
    // Under the Haar measure the angle density is (1 - cos t) / pi on [0, pi].
    Rng rng(2024);
    const int n = 20000, bins = 20;
    std::vector<int> counts(bins, 0);
    for (int i = 0; i < n; ++i) {
        const double t = random_rotation(rng).angle_from_identity();
        counts[std::min(bins - 1, (int)(t / M_PI * bins))]++;
    }
    double stat = 0.0;
    for (int k = 0; k < bins; ++k) {
        const double lo = M_PI * k / bins, hi = M_PI * (k + 1) / bins;
        const double prob = ((hi - std::sin(hi)) - (lo - std::sin(lo))) / M_PI;
        const double expect = n * prob;
        stat += (counts[k] - expect) * (counts[k] - expect) / expect;
    }
    CHECK(oracles::chi_square_p(stat, bins - 1) > 0.001);
}

TEST_CASE("chi-square oracle reproduces known quantiles") {
    // Q(k/2, x/2) checked against tabulated chi-square critical values.
    CHECK(near(oracles::chi_square_p(3.841, 1), 0.05, 2e-4));
    CHECK(near(oracles::chi_square_p(18.307, 10), 0.05, 2e-4));
    CHECK(near(oracles::chi_square_p(30.144, 19), 0.05, 2e-4));
    CHECK(near(oracles::chi_square_p(36.191, 19), 0.01, 2e-4));
}
