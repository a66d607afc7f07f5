#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bimanip/scene_io.hpp"

namespace {

using namespace bimanip;

// Exit codes: 0 success, 2 infeasible or unsolvable, 3 input error,
// 4 budget exhausted.
constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 2;
constexpr int kExitInputError = 3;
constexpr int kExitBudget = 4;

int exit_code_for(const Error& e) {
    return e.code == ErrorCode::kBudgetExhausted ? kExitBudget : kExitInfeasible;
}

PlacementCoord parse_coord(const std::string& s) {
    PlacementCoord p;
    char comma;
    std::istringstream in(s);
    if (!(in >> p.class_id >> comma >> p.x >> comma >> p.y >> comma >> p.theta))
        throw std::runtime_error("expected \"class,x,y,theta\", got \"" + s + "\"");
    return p;
}

int cmd_analyze(const std::string& scene_path, int class_id, double res_xy, double res_theta,
                const std::string& out) {
    const World w = load_scene(scene_path);
    GridResolution res;
    res.dx = res.dy = res_xy;
    res.dtheta = res_theta;
    bool any = false;
    for (std::size_t i = 0; i < w.placements.size(); ++i) {
        if (class_id >= 0 && static_cast<int>(i) != class_id) continue;
        if (!w.placements[i].stable) {
            std::cout << "class " << i << ": unstable, skipped\n";
            continue;
        }
        any = true;
        const PlacementGrid grid = analyze_placement_connectivity(w, static_cast<int>(i), res);
        std::cout << "class " << i << ": cells " << grid.nx << "x" << grid.ny << "x"
                  << grid.ntheta << ", components " << grid.n_components;
        const auto sizes = grid.component_sizes();
        for (std::size_t c = 0; c < sizes.size(); ++c)
            std::cout << (c == 0 ? " sizes " : " ") << sizes[c];
        std::cout << "\n";
        if (!out.empty()) {
            const std::string path = out + ".class" + std::to_string(i) + ".grid";
            save_grid(grid, path);
            std::cout << "  grid dump: " << path << "\n";
        }
    }
    if (!any) {
        std::cerr << "no stable placement class matched\n";
        return kExitInfeasible;
    }
    return kExitOk;
}

int cmd_certify(const std::string& scene_path, std::uint64_t seed, int budget,
                const std::string& out) {
    const World w = load_scene(scene_path);
    CertificateParams params;
    params.seed = seed;
    params.fingerprint = scene_fingerprint(scene_path);
    params.cc.max_iters = budget;
    const Result<Certificate> cert = compute_certificate(w, params);
    if (!cert.ok()) {
        std::cerr << to_string(cert.error().code) << ": " << cert.error().message << "\n";
        return exit_code_for(cert.error());
    }
    save_certificate(cert.value(), out);
    std::cout << "certificate: " << cert.value().nodes.size() << " classes, "
              << cert.value().entries.size() << " transfer trajectories -> " << out << "\n";
    return kExitOk;
}

int cmd_solve(const std::string& scene_path, const std::string& cert_path,
              const std::string& start, const std::string& goal, std::uint64_t seed,
              const std::string& out) {
    const World w = load_scene(scene_path);
    const Certificate cert = load_certificate(cert_path);
    if (cert.fingerprint != scene_fingerprint(scene_path)) {
        std::cerr << "FINGERPRINT_MISMATCH: certificate was built for a different scene\n";
        return kExitInfeasible;
    }
    ManipulationQuery q;
    q.t_start = placement_to_transform(w, parse_coord(start));
    q.t_goal = placement_to_transform(w, parse_coord(goal));
    Rng rng(seed);
    PlanBudget budget;
    const Result<ManipulationTrajectory> traj = solve_query(w, cert, q, budget, rng);
    if (!traj.ok()) {
        std::cerr << to_string(traj.error().code) << ": " << traj.error().message << "\n";
        return exit_code_for(traj.error());
    }
    save_trajectory(traj.value(), out);
    int type_b = 0;
    for (const Segment& s : traj.value().segments)
        if (const TransferSegment* ts = std::get_if<TransferSegment>(&s))
            if (ts->cross_placement) ++type_b;
    std::cout << "solution: " << traj.value().segments.size() << " segments, "
              << traj.value().transfer_count() << " transfers (" << type_b
              << " cross-placement) -> " << out << "\n";
    return kExitOk;
}

int cmd_export(const std::string& traj_path, const std::string& format,
               const std::string& out) {
    const ManipulationTrajectory traj = load_trajectory(traj_path);
    std::ostringstream body;
    if (format == "csv") {
        body << "segment,type,sample,time,px,py,pz,qw,qx,qy,qz,joints1,joints2\n";
        for (std::size_t si = 0; si < traj.segments.size(); ++si) {
            const Segment& seg = traj.segments[si];
            const bool transfer = std::holds_alternative<TransferSegment>(seg);
            const std::size_t n = segment_size(seg);
            for (std::size_t k = 0; k < n; ++k) {
                const CompositeConfig c =
                    std::visit([&](const auto& s) { return s.config_at(k); }, seg);
                const double t = std::visit(
                    [&](const auto& s) { return s.arm1.times[k]; }, seg);
                const auto quat = c.pose.rotation.quaternion();
                body << si << "," << (transfer ? "transfer" : "transit") << "," << k << "," << t
                     << "," << c.pose.translation[0] << "," << c.pose.translation[1] << ","
                     << c.pose.translation[2] << "," << quat.w() << "," << quat.x() << ","
                     << quat.y() << "," << quat.z() << ",";
                for (int i = 0; i < c.q1.size(); ++i) body << (i ? ";" : "") << c.q1[i];
                body << ",";
                for (int i = 0; i < c.q2.size(); ++i) body << (i ? ";" : "") << c.q2[i];
                body << "\n";
            }
        }
    } else if (format == "summary") {
        int type_b = 0;
        std::size_t samples = 0;
        for (const Segment& s : traj.segments) {
            samples += segment_size(s);
            if (const TransferSegment* ts = std::get_if<TransferSegment>(&s))
                if (ts->cross_placement) ++type_b;
        }
        const int transfers = traj.transfer_count();
        body << "segments: " << traj.segments.size() << "\n"
             << "transfer segments: " << transfers << "\n"
             << "cross-placement transfers: " << type_b << "\n"
             << "regrasps: " << std::max(0, transfers - 1) << "\n"
             << "samples: " << samples << "\n"
             << "path length: " << trajectory_length(traj, MetricWeights{}) << "\n";
    } else {
        std::cerr << "unknown format '" << format << "'\n";
        return kExitInputError;
    }
    if (out.empty())
        std::cout << body.str();
    else
        atomic_write(out, body.str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Certified bimanual manipulation planner"};
    app.require_subcommand(1);

    std::string scene, cert, out, start, goal, traj, format = "summary";
    std::uint64_t seed = 0;
    int class_id = -1, budget = 2000;
    double res_xy = 0.02, res_theta = 5.0 * M_PI / 180.0;

    CLI::App* analyze = app.add_subcommand("analyze", "placement connectivity analysis");
    analyze->add_option("scene", scene)->required();
    analyze->add_option("--class", class_id, "restrict to one placement class");
    analyze->add_option("--resolution", res_xy, "grid cell size in meters");
    analyze->add_option("--resolution-theta", res_theta, "angular cell size in radians");
    analyze->add_option("--out", out, "grid dump path prefix");

    CLI::App* certify = app.add_subcommand("certify", "compute a transfer certificate");
    certify->add_option("scene", scene)->required();
    certify->add_option("--seed", seed);
    certify->add_option("--budget", budget, "planner iterations per class pair");
    certify->add_option("--out", out)->required();

    CLI::App* solve = app.add_subcommand("solve", "answer a manipulation query");
    solve->add_option("scene", scene)->required();
    solve->add_option("cert", cert)->required();
    solve->add_option("--start", start, "class,x,y,theta")->required();
    solve->add_option("--goal", goal, "class,x,y,theta")->required();
    solve->add_option("--seed", seed);
    solve->add_option("--out", out)->required();

    CLI::App* exportc = app.add_subcommand("export", "dump a trajectory file");
    exportc->add_option("traj", traj)->required();
    exportc->add_option("--format", format, "csv or summary");
    exportc->add_option("--out", out, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInputError;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(scene, class_id, res_xy, res_theta, out);
        if (certify->parsed()) return cmd_certify(scene, seed, budget, out);
        if (solve->parsed()) return cmd_solve(scene, cert, start, goal, seed, out);
        if (exportc->parsed()) return cmd_export(traj, format, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputError;
    }
    return kExitInputError;
}
