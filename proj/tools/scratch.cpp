#include <chrono>
#include <cstdio>

#include "bimanip/certificate.hpp"
#include "bimanip/scene_io.hpp"

using namespace bimanip;

int main(int argc, char** argv) {
    const World w = load_scene(argc > 1 ? argv[1] : "scenes/desk_box.json");
    const int ci = argc > 2 ? std::atoi(argv[2]) : 0;
    const int cj = argc > 3 ? std::atoi(argv[3]) : 1;

    Rng rng(mix_seed(7, (std::uint64_t)(ci * 16 + cj)));
    auto qr = generate_cc_query(w, ci, cj, Vec2(0.0, 0.0), rng);
    if (!qr.ok()) {
        std::printf("query fail: %s\n", qr.error().message.c_str());
        return 1;
    }
    const ClosedChainQuery& q = qr.value();
    std::printf("grasp g1(a%d s%d d%.2f t%.2f) g2(a%d s%d d%.2f)\n", q.grasp.g1.approach,
                q.grasp.g1.sliding, q.grasp.g1.delta, q.grasp.g1.tilt, q.grasp.g2.approach,
                q.grasp.g2.sliding, q.grasp.g2.delta);
    std::printf("ik classes start (%d,%d) goal (%d,%d)\n", ik_class(w.arms[0], q.q1_start),
                ik_class(w.arms[1], q.q2_start), ik_class(w.arms[0], q.q1_goal),
                ik_class(w.arms[1], q.q2_goal));

    // Manual flip sweep: lift, rotate about u_r through the full flip angle,
    // descend. Track IK continuously and report the first failing check.
    Vec3 u_r = w.arms[1].base.translation - w.arms[0].base.translation;
    u_r[2] = 0.0;
    u_r.normalize();
    const Vec3 down = -Vec3::UnitZ();
    const Vec3 v = q.t_start.rotation * w.placement(cj).normal;
    const double chi = std::atan2(v.cross(down).dot(u_r), v.dot(down));
    std::printf("flip angle chi = %.3f rad\n", chi);

    VecX q1 = q.q1_start, q2 = q.q2_start;
    const double lift = 0.15;
    const int n = 80;
    const TrackTolerances tight{1e-9, 1e-9, kSingularTol, 100};
    int fail_stage = -1;
    for (int k = 0; k <= n; ++k) {
        const double s = (double)k / n;
        // Stage profile: lift in first 25%, rotate in middle 50%, descend last 25%.
        double h, phi;
        if (s < 0.25) {
            h = lift * (s / 0.25);
            phi = 0.0;
        } else if (s < 0.75) {
            h = lift;
            phi = chi * ((s - 0.25) / 0.5);
        } else {
            h = lift * (1.0 - (s - 0.75) / 0.25);
            phi = chi;
        }
        const Rotation r_flip = Rotation::axis_angle(u_r, phi);
        Transform pose;
        pose.rotation = r_flip * q.t_start.rotation;
        const Vec3 base = q.t_start.translation;
        const Vec3 goal_t = q.t_goal.translation;
        // Blend translation start->goal with the rotation stage, plus lift.
        const double rb = std::clamp((s - 0.25) / 0.5, 0.0, 1.0);
        pose.translation = base + rb * (goal_t - base);
        pose.translation[2] += h;

        const Transform t1 = grasp_to_gripper_pose(pose, q.grasp.g1, w.object, w.gripper);
        const Transform t2 = grasp_to_gripper_pose(pose, q.grasp.g2, w.object, w.gripper);
        auto r1 = solve_ik_newton(w.arms[0], t1, q1, tight);
        auto r2 = solve_ik_newton(w.arms[1], t2, q2, tight);
        const char* what = nullptr;
        if (!r1.ok()) what = "ik1";
        else if (!r2.ok()) what = "ik2";
        else {
            q1 = r1.value();
            q2 = r2.value();
            if (!w.arms[0].within_limits(q1)) what = "limits1";
            else if (!w.arms[1].within_limits(q2)) what = "limits2";
            else if (is_singular(w.arms[0], q1)) what = "sing1";
            else if (is_singular(w.arms[1], q2)) what = "sing2";
            else if (!check_collision_free(w, {q1, q2, pose}, true)) what = "collision";
        }
        if (what) {
            std::printf("  s=%.3f (h=%.3f phi=%.2f): FAIL %s\n", s, h, phi, what);
            fail_stage = k;
            break;
        }
    }
    if (fail_stage < 0) std::printf("manual flip sweep: all checks pass\n");

    // Now the real planner.
    CCPlanParams params;
    auto t0 = std::chrono::steady_clock::now();
    auto traj = cc_plan(w, q, params, rng);
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("cc_plan: %s in %.2fs\n", traj ? "OK" : "FAIL", dt);
    if (traj) {
        auto val = validate_trajectory(w, *traj);
        std::printf("  samples %zu valid=%d %s\n", segment_size(traj->segments[0]),
                    (int)val.ok(), val.ok() ? "" : val.error().message.c_str());
    }
    return 0;
}
