#include "bimanip/scene_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace bimanip {

namespace {

using nlohmann::json;

constexpr int kSceneVersion = 1;
constexpr int kCertificateVersion = 1;
constexpr int kTrajectoryVersion = 1;

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json parse_document(const std::string& path) {
    const std::string content = read_file(path);
    try {
        return json::parse(content);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min<std::size_t>(e.byte, content.size());
        const long line = 1 + std::count(content.begin(), content.begin() + upto, '\n');
        throw std::runtime_error(path + ":" + std::to_string(line) + ": " + e.what());
    }
}

[[noreturn]] void fail(const std::string& ctx, const std::string& msg) {
    throw std::runtime_error(ctx + ": " + msg);
}

void expect_keys(const json& j, std::initializer_list<const char*> keys,
                 const std::string& ctx) {
    if (!j.is_object()) fail(ctx, "expected an object");
    for (const auto& item : j.items()) {
        bool known = false;
        for (const char* k : keys)
            if (item.key() == k) known = true;
        if (!known) fail(ctx, "unknown key '" + item.key() + "'");
    }
}

void check_version(const json& j, int expected, const std::string& ctx) {
    if (!j.contains("version") || !j["version"].is_number_integer() ||
        j["version"].get<int>() != expected)
        fail(ctx, "missing or unsupported version (expected " + std::to_string(expected) + ")");
}

double get_num(const json& j, const std::string& ctx) {
    if (!j.is_number()) fail(ctx, "expected a number");
    return j.get<double>();
}

Vec3 get_vec3(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 3) fail(ctx, "expected [x, y, z]");
    return {get_num(j[0], ctx), get_num(j[1], ctx), get_num(j[2], ctx)};
}

Vec2 get_vec2(const json& j, const std::string& ctx) {
    if (!j.is_array() || j.size() != 2) fail(ctx, "expected [x, y]");
    return {get_num(j[0], ctx), get_num(j[1], ctx)};
}

VecX get_vecx(const json& j, const std::string& ctx) {
    if (!j.is_array()) fail(ctx, "expected an array of numbers");
    VecX v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = get_num(j[i], ctx);
    return v;
}

// Scene files describe rotations as roll-pitch-yaw; machine-written files use
// the full 9-entry matrix so poses round-trip exactly.
Transform get_transform(const json& j, const std::string& ctx) {
    expect_keys(j, {"t", "rpy", "r"}, ctx);
    Transform out;
    if (j.contains("t")) out.translation = get_vec3(j["t"], ctx + ".t");
    if (j.contains("rpy") && j.contains("r")) fail(ctx, "give either rpy or r, not both");
    if (j.contains("rpy")) {
        const Vec3 rpy = get_vec3(j["rpy"], ctx + ".rpy");
        out.rotation = Rotation::rot_z(rpy[2]) * Rotation::rot_y(rpy[1]) * Rotation::rot_x(rpy[0]);
    } else if (j.contains("r")) {
        const json& r = j["r"];
        if (!r.is_array() || r.size() != 9) fail(ctx + ".r", "expected 9 numbers (row-major)");
        Mat3 m;
        for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = get_num(r[i], ctx + ".r");
        out.rotation = Rotation(m);
    }
    return out;
}

json transform_to_json(const Transform& t) {
    json j;
    j["t"] = {t.translation[0], t.translation[1], t.translation[2]};
    json r = json::array();
    for (int i = 0; i < 9; ++i) r.push_back(t.rotation.matrix()(i / 3, i % 3));
    j["r"] = std::move(r);
    return j;
}

BoxShape get_shape(const json& j, const std::string& ctx) {
    expect_keys(j, {"frame", "half"}, ctx);
    BoxShape s;
    if (j.contains("frame")) s.frame = get_transform(j["frame"], ctx + ".frame");
    if (!j.contains("half")) fail(ctx, "missing half");
    s.half = get_vec3(j["half"], ctx + ".half");
    return s;
}

std::vector<BoxShape> get_shapes(const json& j, const std::string& ctx) {
    if (!j.is_array()) fail(ctx, "expected an array of boxes");
    std::vector<BoxShape> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(get_shape(j[i], ctx + "[" + std::to_string(i) + "]"));
    return out;
}

SerialArm get_arm(const json& j, const std::string& ctx) {
    expect_keys(j, {"name", "base", "tool", "branch_joints", "home", "joints", "link_shapes"},
                ctx);
    SerialArm arm;
    if (j.contains("name")) arm.name = j["name"].get<std::string>();
    if (j.contains("base")) arm.base = get_transform(j["base"], ctx + ".base");
    if (j.contains("tool")) arm.tool = get_transform(j["tool"], ctx + ".tool");
    if (!j.contains("joints") || !j["joints"].is_array()) fail(ctx, "missing joints");
    for (std::size_t i = 0; i < j["joints"].size(); ++i) {
        const json& jj = j["joints"][i];
        const std::string jctx = ctx + ".joints[" + std::to_string(i) + "]";
        expect_keys(jj, {"axis", "origin", "lo", "hi"}, jctx);
        RevoluteJoint joint;
        if (!jj.contains("axis")) fail(jctx, "missing axis");
        joint.axis = get_vec3(jj["axis"], jctx + ".axis").normalized();
        if (jj.contains("origin")) joint.origin = get_transform(jj["origin"], jctx + ".origin");
        if (!jj.contains("lo") || !jj.contains("hi")) fail(jctx, "missing lo/hi");
        joint.lo = get_num(jj["lo"], jctx + ".lo");
        joint.hi = get_num(jj["hi"], jctx + ".hi");
        arm.joints.push_back(joint);
    }
    if (j.contains("branch_joints"))
        for (const json& b : j["branch_joints"])
            arm.branch_joints.push_back(b.get<int>());
    else
        arm.branch_joints = {2, 4};
    arm.home = j.contains("home") ? get_vecx(j["home"], ctx + ".home")
                                  : VecX(VecX::Zero(arm.dof()));
    if (!j.contains("link_shapes") || !j["link_shapes"].is_array())
        fail(ctx, "missing link_shapes");
    for (std::size_t i = 0; i < j["link_shapes"].size(); ++i)
        arm.link_shapes.push_back(
            get_shapes(j["link_shapes"][i], ctx + ".link_shapes[" + std::to_string(i) + "]"));
    return arm;
}

json coord_to_json(const PlacementCoord& p) {
    return json{{"class_id", p.class_id}, {"x", p.x}, {"y", p.y}, {"theta", p.theta}};
}

PlacementCoord coord_from_json(const json& j, const std::string& ctx) {
    expect_keys(j, {"class_id", "x", "y", "theta"}, ctx);
    return {j.at("class_id").get<int>(), get_num(j.at("x"), ctx), get_num(j.at("y"), ctx),
            get_num(j.at("theta"), ctx)};
}

json grasp_params_to_json(const GraspParams& g) {
    return json{{"link", g.link},
                {"approach", g.approach},
                {"sliding", g.sliding},
                {"delta", g.delta},
                {"tilt", g.tilt}};
}

GraspParams grasp_params_from_json(const json& j, const std::string& ctx) {
    expect_keys(j, {"link", "approach", "sliding", "delta", "tilt"}, ctx);
    return {j.at("link").get<int>(), j.at("approach").get<int>(), j.at("sliding").get<int>(),
            get_num(j.at("delta"), ctx), get_num(j.at("tilt"), ctx)};
}

json grasp_to_json(const BimanualGrasp& g) {
    return json{{"g1", grasp_params_to_json(g.g1)}, {"g2", grasp_params_to_json(g.g2)}};
}

BimanualGrasp grasp_from_json(const json& j, const std::string& ctx) {
    expect_keys(j, {"g1", "g2"}, ctx);
    return {grasp_params_from_json(j.at("g1"), ctx + ".g1"),
            grasp_params_from_json(j.at("g2"), ctx + ".g2")};
}

json samples_to_json(const std::vector<VecX>& samples) {
    json out = json::array();
    for (const VecX& q : samples) {
        json row = json::array();
        for (int i = 0; i < q.size(); ++i) row.push_back(q[i]);
        out.push_back(std::move(row));
    }
    return out;
}

std::vector<VecX> samples_from_json(const json& j, const std::string& ctx) {
    std::vector<VecX> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(get_vecx(j[i], ctx + "[" + std::to_string(i) + "]"));
    return out;
}

json segment_to_json(const Segment& seg) {
    json j;
    if (const TransferSegment* ts = std::get_if<TransferSegment>(&seg)) {
        j["type"] = "transfer";
        j["cross_placement"] = ts->cross_placement;
        j["grasp"] = grasp_to_json(ts->grasp);
        json poses = json::array();
        for (const Transform& p : ts->object_poses) poses.push_back(transform_to_json(p));
        j["object_poses"] = std::move(poses);
        j["times"] = ts->arm1.times;
        j["q1"] = samples_to_json(ts->arm1.samples);
        j["q2"] = samples_to_json(ts->arm2.samples);
    } else {
        const TransitSegment& tr = std::get<TransitSegment>(seg);
        j["type"] = "transit";
        j["object_pose"] = transform_to_json(tr.object_pose);
        j["times"] = tr.arm1.times;
        j["q1"] = samples_to_json(tr.arm1.samples);
        j["q2"] = samples_to_json(tr.arm2.samples);
    }
    return j;
}

Segment segment_from_json(const json& j, const std::string& ctx) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "transfer") {
        expect_keys(j, {"type", "cross_placement", "grasp", "object_poses", "times", "q1", "q2"},
                    ctx);
        TransferSegment ts;
        ts.cross_placement = j.at("cross_placement").get<bool>();
        ts.grasp = grasp_from_json(j.at("grasp"), ctx + ".grasp");
        for (std::size_t i = 0; i < j.at("object_poses").size(); ++i)
            ts.object_poses.push_back(
                get_transform(j["object_poses"][i], ctx + ".object_poses"));
        ts.arm1.arm_id = 0;
        ts.arm2.arm_id = 1;
        ts.arm1.times = j.at("times").get<std::vector<double>>();
        ts.arm2.times = ts.arm1.times;
        ts.arm1.samples = samples_from_json(j.at("q1"), ctx + ".q1");
        ts.arm2.samples = samples_from_json(j.at("q2"), ctx + ".q2");
        if (ts.arm1.samples.size() != ts.object_poses.size() ||
            ts.arm2.samples.size() != ts.object_poses.size() ||
            ts.arm1.times.size() != ts.object_poses.size())
            fail(ctx, "inconsistent transfer sample counts");
        return ts;
    }
    if (type == "transit") {
        expect_keys(j, {"type", "object_pose", "times", "q1", "q2"}, ctx);
        TransitSegment tr;
        tr.object_pose = get_transform(j.at("object_pose"), ctx + ".object_pose");
        tr.arm1.arm_id = 0;
        tr.arm2.arm_id = 1;
        tr.arm1.times = j.at("times").get<std::vector<double>>();
        tr.arm2.times = tr.arm1.times;
        tr.arm1.samples = samples_from_json(j.at("q1"), ctx + ".q1");
        tr.arm2.samples = samples_from_json(j.at("q2"), ctx + ".q2");
        if (tr.arm1.samples.size() != tr.arm2.samples.size() ||
            tr.arm1.times.size() != tr.arm1.samples.size())
            fail(ctx, "inconsistent transit sample counts");
        return tr;
    }
    fail(ctx, "unknown segment type '" + type + "'");
}

json trajectory_to_json(const ManipulationTrajectory& traj) {
    json segs = json::array();
    for (const Segment& s : traj.segments) segs.push_back(segment_to_json(s));
    return json{{"segments", std::move(segs)}};
}

ManipulationTrajectory trajectory_from_json(const json& j, const std::string& ctx) {
    expect_keys(j, {"segments"}, ctx);
    ManipulationTrajectory out;
    for (std::size_t i = 0; i < j.at("segments").size(); ++i)
        out.segments.push_back(segment_from_json(j["segments"][i],
                                                 ctx + ".segments[" + std::to_string(i) + "]"));
    return out;
}

json grid_to_json(const PlacementGrid& g) {
    std::string occ(g.occupancy.size(), '0');
    for (std::size_t i = 0; i < g.occupancy.size(); ++i)
        if (g.occupancy[i]) occ[i] = '1';
    return json{{"class_id", g.class_id}, {"dx", g.dx},     {"dy", g.dy},
                {"dtheta", g.dtheta},     {"nx", g.nx},     {"ny", g.ny},
                {"ntheta", g.ntheta},     {"x0", g.x0},     {"y0", g.y0},
                {"occupancy", occ}};
}

PlacementGrid grid_from_json(const json& j, const std::string& ctx) {
    expect_keys(j, {"class_id", "dx", "dy", "dtheta", "nx", "ny", "ntheta", "x0", "y0",
                    "occupancy"},
                ctx);
    PlacementGrid g;
    g.class_id = j.at("class_id").get<int>();
    g.dx = get_num(j.at("dx"), ctx);
    g.dy = get_num(j.at("dy"), ctx);
    g.dtheta = get_num(j.at("dtheta"), ctx);
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    g.ntheta = j.at("ntheta").get<int>();
    g.x0 = get_num(j.at("x0"), ctx);
    g.y0 = get_num(j.at("y0"), ctx);
    const std::string occ = j.at("occupancy").get<std::string>();
    if (static_cast<long long>(occ.size()) !=
        static_cast<long long>(g.nx) * g.ny * g.ntheta)
        fail(ctx, "occupancy size mismatch");
    g.occupancy.resize(occ.size());
    for (std::size_t i = 0; i < occ.size(); ++i) g.occupancy[i] = occ[i] == '1' ? 1 : 0;
    label_components(g);
    return g;
}

}  // namespace

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw std::runtime_error(tmp + ": cannot open for writing");
        out << content;
        if (!out) throw std::runtime_error(tmp + ": write failed");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw std::runtime_error(path + ": rename failed");
}

World load_scene(const std::string& path) {
    const json j = parse_document(path);
    const std::string ctx = path;
    expect_keys(j,
                {"version", "name", "metric", "gravity", "friction", "cone_edges", "gripper",
                 "object", "surfaces", "obstacles", "arms"},
                ctx);
    check_version(j, kSceneVersion, ctx);

    World w;
    if (j.contains("metric")) {
        const json& m = j["metric"];
        expect_keys(m, {"alpha", "rot_weight", "trans_weight"}, ctx + ".metric");
        if (m.contains("alpha")) w.metric.alpha = get_num(m["alpha"], ctx);
        if (m.contains("rot_weight")) w.metric.rot_weight = get_num(m["rot_weight"], ctx);
        if (m.contains("trans_weight")) w.metric.trans_weight = get_num(m["trans_weight"], ctx);
        w.metric.validate();
    }
    if (j.contains("gravity")) w.gravity = get_vec3(j["gravity"], ctx + ".gravity");
    if (j.contains("friction")) w.friction = get_num(j["friction"], ctx + ".friction");
    if (j.contains("cone_edges")) w.cone_edges = j["cone_edges"].get<int>();

    if (!j.contains("gripper")) fail(ctx, "missing gripper");
    {
        const json& g = j["gripper"];
        expect_keys(g, {"stroke", "finger_depth", "pad_half", "shapes"}, ctx + ".gripper");
        w.gripper.stroke = get_num(g.at("stroke"), ctx + ".gripper.stroke");
        w.gripper.finger_depth = get_num(g.at("finger_depth"), ctx + ".gripper.finger_depth");
        w.gripper.pad_half = get_vec2(g.at("pad_half"), ctx + ".gripper.pad_half");
        w.gripper.shapes = get_shapes(g.at("shapes"), ctx + ".gripper.shapes");
    }

    if (!j.contains("object")) fail(ctx, "missing object");
    {
        const json& o = j["object"];
        expect_keys(o, {"mass", "center_of_mass", "links"}, ctx + ".object");
        w.object.mass = get_num(o.at("mass"), ctx + ".object.mass");
        if (o.contains("center_of_mass"))
            w.object.center_of_mass = get_vec3(o["center_of_mass"], ctx + ".object");
        w.object.links = get_shapes(o.at("links"), ctx + ".object.links");
    }

    if (!j.contains("surfaces") || !j["surfaces"].is_array() || j["surfaces"].empty())
        fail(ctx, "missing surfaces");
    for (std::size_t i = 0; i < j["surfaces"].size(); ++i) {
        const json& s = j["surfaces"][i];
        const std::string sctx = ctx + ".surfaces[" + std::to_string(i) + "]";
        expect_keys(s, {"frame", "half_extents", "thickness"}, sctx);
        SupportSurface surf;
        if (s.contains("frame")) surf.frame = get_transform(s["frame"], sctx + ".frame");
        surf.half_extents = get_vec2(s.at("half_extents"), sctx + ".half_extents");
        if (s.contains("thickness")) surf.thickness = get_num(s["thickness"], sctx);
        w.surfaces.push_back(surf);
    }

    if (j.contains("obstacles")) w.obstacles = get_shapes(j["obstacles"], ctx + ".obstacles");

    if (!j.contains("arms") || !j["arms"].is_array() || j["arms"].size() != 2)
        fail(ctx, "expected exactly two arms");
    for (std::size_t i = 0; i < 2; ++i)
        w.arms.push_back(get_arm(j["arms"][i], ctx + ".arms[" + std::to_string(i) + "]"));

    w.validate();
    w.finalize();
    return w;
}

std::uint64_t scene_fingerprint(const std::string& path) {
    return fnv1a(parse_document(path).dump());
}

void save_certificate(const Certificate& cert, const std::string& path) {
    json j;
    j["version"] = kCertificateVersion;
    j["fingerprint"] = cert.fingerprint;
    j["seed"] = cert.seed;
    json nodes = json::array();
    for (const CertificateNode& n : cert.nodes)
        nodes.push_back(json{{"class_id", n.class_id}, {"component", n.component}});
    j["nodes"] = std::move(nodes);
    json grids = json::array();
    for (const PlacementGrid& g : cert.grids) grids.push_back(grid_to_json(g));
    j["grids"] = std::move(grids);
    json entries = json::array();
    for (const CertificateEntry& e : cert.entries) {
        entries.push_back(json{{"node_a", e.node_a},
                               {"node_b", e.node_b},
                               {"coord_a", coord_to_json(e.coord_a)},
                               {"coord_b", coord_to_json(e.coord_b)},
                               {"grasp", grasp_to_json(e.grasp)},
                               {"trajectory", trajectory_to_json(e.trajectory)}});
    }
    j["entries"] = std::move(entries);
    atomic_write(path, j.dump(1));
}

Certificate load_certificate(const std::string& path) {
    const json j = parse_document(path);
    const std::string ctx = path;
    expect_keys(j, {"version", "fingerprint", "seed", "nodes", "grids", "entries"}, ctx);
    check_version(j, kCertificateVersion, ctx);
    Certificate cert;
    cert.fingerprint = j.at("fingerprint").get<std::uint64_t>();
    cert.seed = j.at("seed").get<std::uint64_t>();
    for (std::size_t i = 0; i < j.at("nodes").size(); ++i) {
        const json& n = j["nodes"][i];
        expect_keys(n, {"class_id", "component"}, ctx + ".nodes");
        cert.nodes.push_back({n.at("class_id").get<int>(), n.at("component").get<int>()});
    }
    for (std::size_t i = 0; i < j.at("grids").size(); ++i)
        cert.grids.push_back(
            grid_from_json(j["grids"][i], ctx + ".grids[" + std::to_string(i) + "]"));
    for (std::size_t i = 0; i < j.at("entries").size(); ++i) {
        const json& e = j["entries"][i];
        const std::string ectx = ctx + ".entries[" + std::to_string(i) + "]";
        expect_keys(e, {"node_a", "node_b", "coord_a", "coord_b", "grasp", "trajectory"}, ectx);
        CertificateEntry entry;
        entry.node_a = e.at("node_a").get<int>();
        entry.node_b = e.at("node_b").get<int>();
        entry.coord_a = coord_from_json(e.at("coord_a"), ectx + ".coord_a");
        entry.coord_b = coord_from_json(e.at("coord_b"), ectx + ".coord_b");
        entry.grasp = grasp_from_json(e.at("grasp"), ectx + ".grasp");
        entry.trajectory = trajectory_from_json(e.at("trajectory"), ectx + ".trajectory");
        cert.entries.push_back(std::move(entry));
    }
    return cert;
}

void save_trajectory(const ManipulationTrajectory& traj, const std::string& path) {
    json j = trajectory_to_json(traj);
    j["version"] = kTrajectoryVersion;
    atomic_write(path, j.dump(1));
}

ManipulationTrajectory load_trajectory(const std::string& path) {
    json j = parse_document(path);
    expect_keys(j, {"version", "segments"}, path);
    check_version(j, kTrajectoryVersion, path);
    j.erase("version");
    return trajectory_from_json(j, path);
}

Result<bool> validate_certificate(const World& w, const Certificate& cert) {
    for (std::size_t i = 0; i < cert.entries.size(); ++i) {
        Result<bool> r = validate_trajectory(w, cert.entries[i].trajectory);
        if (!r.ok()) {
            Error e = r.error();
            e.message = "entry " + std::to_string(i) + ": " + e.message;
            return e;
        }
    }
    if (!cert.spans())
        return Error{ErrorCode::kSpanningFailed, "stored entries do not span the nodes"};
    return true;
}

}  // namespace bimanip
