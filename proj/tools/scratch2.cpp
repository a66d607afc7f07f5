#include <chrono>
#include <cstdio>

#include "bimanip/scene_io.hpp"
#include "bimanip/grasp.hpp"

using namespace bimanip;

int main() {
    const World w = load_scene("scenes/desk_box.json");
    const Transform pose = placement_to_transform(w, {0, 0.0, 0.0, 0.3});
    BimanualGrasp g{{0, 1, 3, 0.4, 0.0}, {0, 4, 3, 0.6, 0.0}};

    auto t0 = std::chrono::steady_clock::now();
    int n = 0, feas = 0;
    for (int i = 0; i < 2000; ++i) {
        Transform p2 = pose;
        p2.rotation = Rotation::rot_x(0.001 * i) * pose.rotation;
        auto r = check_static_equilibrium(w.object, w.gripper, p2, g, w.gravity, w.friction,
                                          w.cone_edges);
        ++n;
        if (r.ok() && r.value()) ++feas;
    }
    const double dt =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%d LPs, %d feasible, %.1f us each\n", n, feas, 1e6 * dt / n);

    // IK solve benchmark for comparison.
    const Transform t1 = grasp_to_gripper_pose(pose, g.g1, w.object, w.gripper);
    auto s = solve_ik(w.arms[0], t1);
    if (!s.ok()) { std::printf("ik fail\n"); return 1; }
    t0 = std::chrono::steady_clock::now();
    const TrackTolerances tight{1e-9, 1e-9, kSingularTol, 100};
    for (int i = 0; i < 2000; ++i) {
        Transform tt = t1;
        tt.translation[2] += 1e-4 * (i % 7);
        auto r = solve_ik_newton(w.arms[0], tt, s.value(), tight);
        if (!r.ok()) { std::printf("ik fail %d\n", i); return 1; }
    }
    const double dt2 =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("2000 tracking IK solves, %.1f us each\n", 1e6 * dt2 / 2000);
    return 0;
}
