#include "bimanip/certificate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>

#include "bimanip/parallel.hpp"

namespace bimanip {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

double config_gap(const CompositeConfig& a, const CompositeConfig& b) {
    return (a.q1 - b.q1).lpNorm<Eigen::Infinity>() + (a.q2 - b.q2).lpNorm<Eigen::Infinity>() +
           geodesic_distance(a.pose.rotation, b.pose.rotation) +
           (a.pose.translation - b.pose.translation).lpNorm<Eigen::Infinity>();
}

bool same_coord(const PlacementCoord& a, const PlacementCoord& b) {
    double dt = std::fmod(std::abs(a.theta - b.theta), 2.0 * M_PI);
    dt = std::min(dt, 2.0 * M_PI - dt);
    return a.class_id == b.class_id && std::abs(a.x - b.x) < 1e-9 &&
           std::abs(a.y - b.y) < 1e-9 && dt < 1e-9;
}

void renormalize_times(JointTrajectory& t) {
    const std::size_t n = t.samples.size();
    t.times.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        t.times[i] = n > 1 ? static_cast<double>(i) / (n - 1) : 0.0;
}

}  // namespace

int Certificate::node_of(const PlacementCoord& p) const {
    if (p.class_id < 0 || p.class_id >= static_cast<int>(grids.size())) return -1;
    const int comp = grids[p.class_id].component_at(p);
    if (comp < 0) return -1;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i] == CertificateNode{p.class_id, comp}) return static_cast<int>(i);
    return -1;
}

bool Certificate::spans() const {
    if (nodes.empty()) return true;
    UnionFind uf(static_cast<int>(nodes.size()));
    for (const CertificateEntry& e : entries) uf.unite(e.node_a, e.node_b);
    const int root = uf.find(0);
    for (int i = 1; i < static_cast<int>(nodes.size()); ++i)
        if (uf.find(i) != root) return false;
    return true;
}

Result<Certificate> compute_certificate(const World& w, const CertificateParams& params) {
    Certificate cert;
    cert.fingerprint = params.fingerprint;
    cert.seed = params.seed;

    cert.grids.resize(w.placements.size());
    for (std::size_t i = 0; i < w.placements.size(); ++i) {
        cert.grids[i].class_id = static_cast<int>(i);
        if (w.placements[i].stable)
            cert.grids[i] = analyze_placement_connectivity(w, static_cast<int>(i),
                                                           params.grid_res);
    }
    for (std::size_t i = 0; i < cert.grids.size(); ++i)
        for (int c = 0; c < cert.grids[i].n_components; ++c)
            cert.nodes.push_back({static_cast<int>(i), c});
    if (cert.nodes.empty())
        return Error{ErrorCode::kSpanningFailed, "no reachable placement class"};

    std::vector<std::pair<int, int>> pairs;
    for (std::size_t a = 0; a < cert.nodes.size(); ++a)
        for (std::size_t b = a + 1; b < cert.nodes.size(); ++b)
            if (cert.nodes[a].class_id != cert.nodes[b].class_id)
                pairs.emplace_back(static_cast<int>(a), static_cast<int>(b));

    // Default staging point: between the arm bases, in surface coordinates.
    const Vec3 mid_world = 0.5 * (w.arms[0].base.translation + w.arms[1].base.translation);
    const Vec3 mid_local = w.surfaces[0].frame.inverse() * mid_world;
    const Vec2 base_point(mid_local[0], mid_local[1]);

    std::vector<std::optional<CertificateEntry>> results(pairs.size());
    parallel_for(static_cast<int>(pairs.size()), [&](int pi) {
        const auto [na, nb] = pairs[pi];
        const CertificateNode& a = cert.nodes[na];
        const CertificateNode& b = cert.nodes[nb];
        Rng rng(mix_seed(params.seed,
                         (static_cast<std::uint64_t>(na) << 32) | static_cast<std::uint64_t>(nb)));
        const auto t0 = std::chrono::steady_clock::now();
        for (int attempt = 0; attempt < params.query_retries; ++attempt) {
            if (std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >
                params.per_pair_seconds)
                break;
            Vec2 pt = base_point;
            if (attempt > 0) {
                // Uniform perturbation in a 5 cm disc.
                const double r = 0.05 * std::sqrt(rng.uniform());
                const double phi = rng.uniform(0.0, 2.0 * M_PI);
                pt += Vec2(r * std::cos(phi), r * std::sin(phi));
            }
            Result<ClosedChainQuery> q =
                generate_cc_query(w, a.class_id, b.class_id, pt, rng);
            if (!q.ok()) continue;
            if (cert.grids[a.class_id].component_at(q.value().coord_start) != a.component ||
                cert.grids[b.class_id].component_at(q.value().coord_goal) != b.component)
                continue;
            std::optional<ManipulationTrajectory> traj =
                cc_plan(w, q.value(), params.cc, rng);
            if (!traj) continue;
            ManipulationTrajectory best = shortcut_cc(w, *traj, params.shortcut_iters, rng);
            if (!validate_trajectory(w, best).ok()) best = *traj;
            CertificateEntry entry;
            entry.node_a = na;
            entry.node_b = nb;
            entry.coord_a = q.value().coord_start;
            entry.coord_b = q.value().coord_goal;
            entry.grasp = q.value().grasp;
            entry.trajectory = std::move(best);
            results[pi] = std::move(entry);
            break;
        }
    });
    for (auto& r : results)
        if (r) cert.entries.push_back(std::move(*r));

    if (!cert.spans()) {
        UnionFind uf(static_cast<int>(cert.nodes.size()));
        for (const CertificateEntry& e : cert.entries) uf.unite(e.node_a, e.node_b);
        std::ostringstream msg;
        msg << "certificate does not span the reachable classes; groups:";
        for (std::size_t i = 0; i < cert.nodes.size(); ++i)
            msg << " node" << i << "->" << uf.find(static_cast<int>(i));
        return Error{ErrorCode::kSpanningFailed, msg.str()};
    }
    return cert;
}

Result<std::vector<int>> extract_placement_sequence(const Certificate& cert, int node_s,
                                                    int node_g) {
    const int n = static_cast<int>(cert.nodes.size());
    if (node_s < 0 || node_s >= n || node_g < 0 || node_g >= n)
        throw std::invalid_argument("extract_placement_sequence: node out of range");
    if (node_s == node_g) return std::vector<int>{};

    std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, entry index)
    for (std::size_t e = 0; e < cert.entries.size(); ++e) {
        adj[cert.entries[e].node_a].emplace_back(cert.entries[e].node_b, static_cast<int>(e));
        adj[cert.entries[e].node_b].emplace_back(cert.entries[e].node_a, static_cast<int>(e));
    }

    // Distance to the goal, then a greedy descent picking the smallest
    // (class, component) neighbor at each step.
    std::vector<int> dist(n, -1);
    std::queue<int> queue;
    dist[node_g] = 0;
    queue.push(node_g);
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop();
        for (const auto& [nb, e] : adj[v])
            if (dist[nb] < 0) {
                dist[nb] = dist[v] + 1;
                queue.push(nb);
            }
    }
    if (dist[node_s] < 0) return Error{ErrorCode::kNotConnected, "no certificate path"};

    std::vector<int> edges;
    int cur = node_s;
    while (cur != node_g) {
        int best_nb = -1, best_edge = -1;
        for (const auto& [nb, e] : adj[cur]) {
            if (dist[nb] != dist[cur] - 1) continue;
            if (best_nb < 0 ||
                std::pair(cert.nodes[nb].class_id, cert.nodes[nb].component) <
                    std::pair(cert.nodes[best_nb].class_id, cert.nodes[best_nb].component) ||
                (nb == best_nb && e < best_edge)) {
                best_nb = nb;
                best_edge = e;
            }
        }
        edges.push_back(best_edge);
        cur = best_nb;
    }
    return edges;
}

ManipulationTrajectory reverse_trajectory(const ManipulationTrajectory& t) {
    ManipulationTrajectory out;
    for (auto it = t.segments.rbegin(); it != t.segments.rend(); ++it) {
        Segment s = *it;
        if (TransferSegment* ts = std::get_if<TransferSegment>(&s)) {
            std::reverse(ts->object_poses.begin(), ts->object_poses.end());
            std::reverse(ts->arm1.samples.begin(), ts->arm1.samples.end());
            std::reverse(ts->arm2.samples.begin(), ts->arm2.samples.end());
            renormalize_times(ts->arm1);
            renormalize_times(ts->arm2);
        } else {
            TransitSegment& tr = std::get<TransitSegment>(s);
            std::reverse(tr.arm1.samples.begin(), tr.arm1.samples.end());
            std::reverse(tr.arm2.samples.begin(), tr.arm2.samples.end());
            renormalize_times(tr.arm1);
            renormalize_times(tr.arm2);
        }
        out.segments.push_back(std::move(s));
    }
    return out;
}

ManipulationTrajectory compose(const std::vector<ManipulationTrajectory>& parts) {
    ManipulationTrajectory out;
    for (std::size_t p = 0; p < parts.size(); ++p) {
        for (const Segment& seg : parts[p].segments) {
            if (!out.segments.empty()) {
                const double gap = config_gap(segment_end(out.segments.back()),
                                              segment_start(seg));
                if (gap > 1e-6) {
                    std::ostringstream msg;
                    msg << "compose: boundary mismatch " << gap << " before part " << p;
                    throw std::invalid_argument(msg.str());
                }
            }
            // Merge runs of transit segments into one.
            const TransitSegment* next_tr = std::get_if<TransitSegment>(&seg);
            TransitSegment* prev_tr = out.segments.empty()
                                          ? nullptr
                                          : std::get_if<TransitSegment>(&out.segments.back());
            if (next_tr != nullptr && prev_tr != nullptr) {
                for (std::size_t i = 1; i < next_tr->size(); ++i) {
                    prev_tr->arm1.samples.push_back(next_tr->arm1.samples[i]);
                    prev_tr->arm2.samples.push_back(next_tr->arm2.samples[i]);
                }
                renormalize_times(prev_tr->arm1);
                renormalize_times(prev_tr->arm2);
            } else {
                out.segments.push_back(seg);
            }
        }
    }
    return out;
}

Result<ManipulationTrajectory> solve_query(const World& w, const Certificate& cert,
                                           const ManipulationQuery& q, const PlanBudget& budget,
                                           Rng& rng) {
    Result<PlacementCoord> cs = classify_placement(w, q.t_start);
    if (!cs.ok()) return cs.error();
    Result<PlacementCoord> cg = classify_placement(w, q.t_goal);
    if (!cg.ok()) return cg.error();
    const int node_s = cert.node_of(cs.value());
    const int node_g = cert.node_of(cg.value());
    if (node_s < 0 || node_g < 0)
        return Error{ErrorCode::kInfeasible, "query pose outside the feasible placement set"};

    Result<std::vector<int>> seq = extract_placement_sequence(cert, node_s, node_g);
    if (!seq.ok()) return seq.error();

    // In-placement legs between consecutive certificate edges.
    auto typea_leg = [&](const PlacementCoord& from,
                         const PlacementCoord& to) -> Result<ManipulationTrajectory> {
        Result<ObjectPath> path =
            plan_object_path(w, cert.grids[from.class_id], from, to);
        if (!path.ok()) return path.error();
        return plan_typea(w, path.value(), budget, rng);
    };

    std::vector<ManipulationTrajectory> parts;
    PlacementCoord cur = cs.value();
    int cur_node = node_s;
    for (int ei : seq.value()) {
        const CertificateEntry& e = cert.entries[ei];
        const bool forward = e.node_a == cur_node;
        const PlacementCoord& entry_coord = forward ? e.coord_a : e.coord_b;
        const PlacementCoord& exit_coord = forward ? e.coord_b : e.coord_a;
        if (!same_coord(cur, entry_coord)) {
            Result<ManipulationTrajectory> leg = typea_leg(cur, entry_coord);
            if (!leg.ok())
                return Error{ErrorCode::kTypeAFailed, leg.error().message, ei};
            parts.push_back(std::move(leg).take());
        }
        parts.push_back(forward ? e.trajectory : reverse_trajectory(e.trajectory));
        cur = exit_coord;
        cur_node = forward ? e.node_b : e.node_a;
    }
    if (!same_coord(cur, cg.value()) || parts.empty()) {
        Result<ManipulationTrajectory> leg = typea_leg(cur, cg.value());
        if (!leg.ok()) return Error{ErrorCode::kTypeAFailed, leg.error().message, -1};
        parts.push_back(std::move(leg).take());
    }

    // Bridge mismatched junctions with transit motions (the object pose
    // matches there; only the arms differ).
    std::vector<ManipulationTrajectory> bridged;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) {
            const CompositeConfig a = bridged.back().end_config();
            const CompositeConfig b = parts[i].start_config();
            if (config_gap(a, b) > 1e-6) {
                Result<TransitSegment> bridge = plan_transit(w, a, b, budget, rng);
                if (!bridge.ok()) return bridge.error();
                ManipulationTrajectory t;
                t.segments.emplace_back(std::move(bridge).take());
                bridged.push_back(std::move(t));
            }
        }
        bridged.push_back(parts[i]);
    }
    return compose(bridged);
}

}  // namespace bimanip
