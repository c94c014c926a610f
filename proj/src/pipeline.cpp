#include "bridgenav/pipeline.hpp"

#include "bridgenav/error.hpp"
#include "bridgenav/svg.hpp"
#include "bridgenav/synth.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bridgenav {

namespace {

template <class F>
auto stage(const char* name, F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        throw StageError(name, e.code(), e.what());
    }
}

// Independent stream for dropout so it does not shift the generator's draws.
std::uint64_t degrade_seed(std::uint64_t seed)
{
    return seed ^ 0x9e3779b97f4a7c15ULL;
}

Json xy(const Point2& p)
{
    return Json::array({p.x(), p.y()});
}

Json xyz(const Point3& p)
{
    return Json::array({p.x(), p.y(), p.z()});
}

template <class Pts>
Json point_list(const Pts& pts)
{
    Json out = Json::array();
    for (const auto& p : pts) {
        if constexpr (std::decay_t<decltype(p)>::RowsAtCompileTime == 2)
            out.push_back(xy(p));
        else
            out.push_back(xyz(p));
    }
    return out;
}

StructureSpec structure_spec(const PipelineConfig& c)
{
    StructureSpec s;
    s.shape = c.synthetic.shape;
    s.bar_length = c.synthetic.bar_length;
    s.bar_width = c.synthetic.bar_width;
    s.density = c.synthetic.density;
    s.noise_sigma = c.synthetic.noise_sigma;
    s.junction_scale = c.synthetic.junction_scale;
    s.seed = c.seed;
    return s;
}

PlaneSpec plane_spec(const PipelineConfig& c)
{
    PlaneSpec p;
    p.size_x = c.plane.size_x;
    p.size_y = c.plane.size_y;
    p.density = c.plane.density;
    p.noise_sigma = c.plane.noise_sigma;
    p.height = c.plane.height;
    p.seed = c.seed;
    return p;
}

bool degrading(const PipelineConfig& c)
{
    return c.synthetic.dropout > 0.0 || c.synthetic.range_falloff > 0.0;
}

Json source_json(const PipelineConfig& c, bool plane)
{
    if (c.input)
        return {{"kind", "file"}, {"path", *c.input}};
    Json j = {{"kind", "synthetic"}, {"shape", plane ? "plane" : std::string(to_string(c.synthetic.shape))}};
    j["seed"] = c.seed;
    return j;
}

std::string dump(const Json& j)
{
    return j.dump(1) + "\n";
}

} // namespace

PointCloud ingest(const PipelineConfig& config, bool plane)
{
    PointCloud cloud;
    if (config.input) {
        const std::filesystem::path path(*config.input);
        cloud = load_cloud(path, config.input_format ? *config.input_format : format_from_extension(path));
    } else if (plane) {
        cloud = generate_plane(plane_spec(config));
    } else {
        cloud = generate(structure_spec(config)).first;
        if (degrading(config))
            cloud = degrade(cloud, config.synthetic.dropout, config.synthetic.range_falloff,
                            degrade_seed(config.seed));
    }
    for (const auto& p : config.cloud.passthrough)
        cloud = passthrough_filter(cloud, p.axis, p.min, p.max);
    if (config.cloud.voxel_leaf)
        cloud = voxel_downsample(cloud, *config.cloud.voxel_leaf);
    return cloud;
}

bool Navigation::complete() const
{
    if (!motion.failures.empty() || motion.paths.size() != route.edge_sequence.size())
        return false;
    std::vector<bool> covered(graph.edges.size(), false);
    for (int e : route.base_edge_sequence)
        covered[static_cast<std::size_t>(e)] = true;
    return std::all_of(covered.begin(), covered.end(), [](bool b) { return b; });
}

Navigation run_navigation(const PipelineConfig& config)
{
    config.validate();
    Navigation nav;
    ResolvedParams& rp = nav.params;
    rp.footprint = Footprint::rectangle(config.footprint.width, config.footprint.length);

    const PointCloud raw = stage("ingest", [&] { return ingest(config, false); });
    nav.cloud = stage("project", [&] {
        return project_to_2d(transform_cloud(raw, config.cloud.camera_to_base, Frame::RobotBase));
    });
    const Points2 pts = xy_points(nav.cloud);

    nav.clusters = stage("segmentation", [&] {
        if (pts.size() < 3)
            throw Error(Errc::TooFewPoints, "the cloud has " + std::to_string(pts.size()) + " points");
        rp.alpha_s = config.boundary.alpha_s ? *config.boundary.alpha_s : default_alpha(pts);
        if (!(rp.alpha_s > 0.0))
            throw Error(Errc::InvalidAlpha, "cannot derive a slicing width from coincident points");
        rp.eps_border = config.boundary.eps_border ? *config.boundary.eps_border : 2.0 * rp.alpha_s;
        rp.l_b = config.boundary.l_b ? *config.boundary.l_b
                                      : std::max(config.footprint.width / 2.0, 2.0 * rp.eps_border);
        SegmentationParams sp;
        sp.n_cmin = config.segmentation.n_cmin;
        sp.n_cmax = config.segmentation.n_cmax;
        sp.l_b = rp.l_b;
        sp.eps_border = rp.eps_border;
        sp.alpha_s = rp.alpha_s;
        sp.seed = config.seed;
        sp.em = config.segmentation.em;
        return segment_structure(pts, sp);
    });

    nav.graph = stage("graph", [&] {
        rp.d_min = config.graph.d_min ? *config.graph.d_min : config.footprint.length;
        return build_graph(nav.clusters, rp.d_min);
    });

    nav.route = stage("route", [&] {
        const auto& vs = nav.graph.vertices;
        if (vs.empty())
            throw Error(Errc::EmptyGraph, "structure graph has no vertices");
        int first = -1, last = -1;
        for (const auto& v : vs)
            if (v.kind == VertexKind::BarEnd) {
                if (first < 0)
                    first = v.id;
                last = v.id;
            }
        if (first < 0) {
            first = 0;
            last = static_cast<int>(vs.size()) - 1;
        }
        rp.v_s = config.route.v_s ? *config.route.v_s : first;
        rp.v_t = config.route.v_t ? *config.route.v_t : last;
        for (int v : {rp.v_s, rp.v_t})
            if (v >= static_cast<int>(vs.size()))
                throw Error(Errc::UnknownVertex, "vertex " + std::to_string(v) + " is not in the graph");
        return vocpp(nav.graph.weighted(), rp.v_s, rp.v_t);
    });

    stage("planner", [&] {
        nav.tiles = navigation_boundaries(nav.clusters, rp.alpha_s);
        rp.rrt = RrtParams::for_footprint(rp.footprint);
        if (config.planner.step)
            rp.rrt.step = *config.planner.step;
        if (config.planner.goal_tol)
            rp.rrt.goal_tol = *config.planner.goal_tol;
        rp.rrt.theta_step = config.planner.theta_step;
        rp.rrt.goal_bias = config.planner.goal_bias;
        rp.rrt.max_iters = config.planner.max_iters;
        rp.rrt.theta_weight = config.planner.theta_weight;
        rp.pibc.n_candidates = config.planner.n_candidates;
        rp.pibc.m = config.planner.m;
        rp.pibc.rule = config.boundary.inside_rule;
        nav.motion = plan_route(nav.route, nav.graph, nav.tiles, rp.footprint, rp.pibc, rp.rrt, config.seed);
        return 0;
    });
    return nav;
}

RunOutput navigation_artifacts(const Navigation& nav, const PipelineConfig& config)
{
    const ResolvedParams& rp = nav.params;
    RunOutput out;
    auto add = [&](const std::string& stem, const Json& j, std::string (*render)(const Json&)) {
        out.artifacts.push_back({stem + ".json", dump(j)});
        out.artifacts.push_back({stem + ".svg", render(j)});
    };

    const Points2 pts = xy_points(nav.cloud);
    Json cloud = {{"schema_version", kSchemaVersion}, {"artifact", "cloud"}};
    cloud["source"] = source_json(config, false);
    cloud["frame"] = std::string(to_string(nav.cloud.frame));
    cloud["count"] = pts.size();
    cloud["points"] = point_list(pts);
    add("cloud", cloud, render_cloud_svg);

    const ClusterSet& cs = nav.clusters;
    Json seg = {{"schema_version", kSchemaVersion}, {"artifact", "segmentation"}};
    seg["n_c"] = cs.size();
    seg["alpha_s"] = rp.alpha_s;
    seg["eps_border"] = rp.eps_border;
    seg["l_b"] = rp.l_b;
    Json table = Json::array();
    for (const auto& r : cs.ratio_table)
        table.push_back({{"n_c", r.n_c},
                         {"n_m", r.n_m},
                         {"n_s", r.n_s},
                         {"r", r.r},
                         {"log_likelihood", r.log_likelihood},
                         {"bic", r.bic},
                         {"max_ll_decrease", r.max_ll_decrease}});
    seg["ratio_table"] = table;
    Json clusters = Json::array();
    for (const auto& c : cs.clusters) {
        Json nb = Json::array();
        for (std::size_t k = 0; k < cs.size(); ++k)
            if (cs.neighbors[static_cast<std::size_t>(c.id)][k])
                nb.push_back(k);
        clusters.push_back(
            {{"id", c.id}, {"size", c.points.size()}, {"mean", xy(c.mean)}, {"neighbors", nb}, {"points", point_list(c.points)}});
    }
    seg["clusters"] = clusters;
    seg["labels"] = cs.labels;
    add("segmentation", seg, render_segmentation_svg);

    Json bg = {{"schema_version", kSchemaVersion}, {"artifact", "boundaries_graph"}};
    Json bounds = Json::array();
    for (std::size_t i = 0; i < cs.boundaries.size(); ++i)
        bounds.push_back({{"cluster", i},
                          {"center", xy(cs.boundaries[i].center)},
                          {"points", point_list(cs.boundaries[i].points)}});
    bg["boundaries"] = bounds;
    Json borders = Json::array();
    for (const auto& b : cs.borders)
        borders.push_back({{"clusters", {b.cluster_a, b.cluster_b}},
                           {"length", b.length},
                           {"midpoint", xy(b.midpoint)},
                           {"points", point_list(b.points)}});
    bg["borders"] = borders;
    Json verts = Json::array();
    for (const auto& v : nav.graph.vertices) {
        Json jv = {{"id", v.id}, {"kind", std::string(to_string(v.kind))}, {"x", v.pos.x()}, {"y", v.pos.y()},
                   {"cluster", v.cluster}};
        if (v.kind == VertexKind::BorderMid)
            jv["cluster_b"] = v.cluster_b;
        verts.push_back(jv);
    }
    Json edges = Json::array();
    for (std::size_t i = 0; i < nav.graph.edges.size(); ++i) {
        const auto& e = nav.graph.edges[i];
        edges.push_back({{"id", i}, {"u", e.u}, {"v", e.v}, {"w", e.w}});
    }
    bg["graph"] = {{"d_min", rp.d_min},
                   {"vertices", verts},
                   {"edges", edges},
                   {"component_count", nav.graph.component_count},
                   {"warnings", nav.graph.warnings}};
    add("boundaries_graph", bg, render_boundaries_graph_svg);

    const RoutePlan& route = nav.route;
    Json rj = {{"schema_version", kSchemaVersion}, {"artifact", "route"}};
    rj["v_s"] = rp.v_s;
    rj["v_t"] = rp.v_t;
    rj["provenance"] = std::string(to_string(route.provenance));
    rj["vertices"] = verts;
    Json redges = Json::array();
    for (std::size_t i = 0; i < nav.graph.edges.size(); ++i) {
        const auto& e = nav.graph.edges[i];
        redges.push_back({{"id", i}, {"u", e.u}, {"v", e.v}, {"w", e.w}, {"visits", route.edge_visits[i]}});
    }
    rj["edges"] = redges;
    Json steps = Json::array();
    for (std::size_t k = 0; k < route.edge_sequence.size(); ++k)
        steps.push_back({{"step", k},
                         {"u", route.walk[k]},
                         {"v", route.walk[k + 1]},
                         {"base_edge", route.base_edge_sequence[k]},
                         {"duplicate", route.edge_sequence[k] >= static_cast<int>(nav.graph.edges.size())}});
    rj["steps"] = steps;
    rj["walk"] = route.walk;
    rj["total_length"] = route.total_length;
    rj["base_weight"] = nav.graph.weighted().total_weight();
    rj["covers_all_edges"] = std::all_of(route.edge_visits.begin(), route.edge_visits.end(),
                                         [](int v) { return v >= 1; }) &&
                             route.base_edge_sequence.size() == route.edge_sequence.size();
    add("route", rj, render_route_svg);

    Json mj = {{"schema_version", kSchemaVersion}, {"artifact", "motion_paths"}};
    mj["footprint"] = {{"width", rp.footprint.width}, {"length", rp.footprint.length}};
    mj["planner"] = {{"step", rp.rrt.step},
                     {"theta_step", rp.rrt.theta_step},
                     {"goal_tol", rp.rrt.goal_tol},
                     {"goal_bias", rp.rrt.goal_bias},
                     {"max_iters", rp.rrt.max_iters},
                     {"theta_weight", rp.rrt.theta_weight},
                     {"n_candidates", rp.pibc.n_candidates},
                     {"m", rp.pibc.m},
                     {"inside_rule", rp.pibc.rule == InsideRule::All ? "all" : "any"},
                     {"seed", config.seed}};
    Json tiles = Json::array();
    for (const auto& t : nav.tiles)
        tiles.push_back({{"center", xy(t.center)}, {"points", point_list(t.points)}});
    mj["tiles"] = tiles;
    Json paths = Json::array();
    for (const auto& p : nav.motion.paths) {
        Json cfgs = Json::array();
        for (const auto& c : p.configs)
            cfgs.push_back({c.x, c.y, c.theta});
        paths.push_back({{"step", p.step}, {"edge", {p.u, p.v}}, {"configs", cfgs}});
    }
    mj["paths"] = paths;
    Json fails = Json::array();
    for (const auto& f : nav.motion.failures)
        fails.push_back({{"step", f.step},
                         {"edge", {f.u, f.v}},
                         {"code", std::string(to_string(f.code))},
                         {"message", f.message}});
    mj["failures"] = fails;
    mj["complete"] = nav.complete();
    add("motion_paths", mj, render_motion_svg);

    if (!nav.complete()) {
        out.exit_code = kExitPartial;
        Json fj = {{"schema_version", kSchemaVersion}, {"artifact", "failures"}, {"stage", "planner"}};
        fj["failures"] = fails;
        out.artifacts.push_back({"failures.json", dump(fj)});
    }
    return out;
}

Switching run_switching(const PipelineConfig& config)
{
    config.validate();
    Switching sw;
    const PointCloud cloud = stage("ingest", [&] { return ingest(config, true); });
    sw.input_points = cloud.size();
    const auto& w = config.switching;

    try {
        RansacParams rp;
        rp.dist_thresh = w.ransac_dist_thresh;
        rp.max_iters = w.ransac_max_iters;
        rp.min_inlier_fraction = w.min_inlier_fraction;
        rp.seed = config.seed;
        sw.plane = extract_plane_ransac(cloud, rp);
    } catch (const Error& e) {
        if (e.code() != Errc::DegenerateCloud && e.code() != Errc::NoPlane)
            throw StageError("plane", e.code(), e.what());
        sw.plane_message = e.what();
    }

    const bool s_pa = sw.plane && plane_available(sw.plane->inliers);
    bool s_am = false, s_hc = false;
    if (s_pa) {
        const PlanePatch& plane = *sw.plane;
        sw.boundary = stage("boundary", [&] { return ncbe(plane.inliers.points, w.alpha_s); });
        sw.area = stage("area", [&] { return area_check_detailed(sw.boundary, plane.centroid, plane.normal, w.foot); });
        s_am = sw.area.pose.has_value();
        sw.centroid_base = transform_point(plane.centroid, config.cloud.camera_to_base);
        s_hc = height_available(plane.centroid, config.cloud.camera_to_base, w.base_height, w.height_tol);
    }
    sw.decision = switch_decision(s_pa, s_am, s_hc, sw.area.pose);
    return sw;
}

RunOutput switching_artifacts(const Switching& sw, const PipelineConfig& config)
{
    const auto& w = config.switching;
    Json j = {{"schema_version", kSchemaVersion}, {"artifact", "switching"}};
    j["source"] = source_json(config, true);
    j["input_points"] = sw.input_points;
    if (sw.plane)
        j["plane"] = {{"normal", xyz(sw.plane->normal)},
                      {"offset", sw.plane->offset},
                      {"centroid", xyz(sw.plane->centroid)},
                      {"inlier_count", sw.plane->inliers.size()}};
    else
        j["plane"] = nullptr;
    j["plane_message"] = sw.plane_message;
    j["foot"] = {{"width", w.foot.width}, {"length", w.foot.length}, {"t", w.foot.t}, {"n", w.foot.n}, {"m", w.foot.m}};
    j["alpha_s"] = w.alpha_s;
    j["boundary"] = point_list(sw.boundary.points);
    Json cands = Json::array();
    for (const auto& c : sw.area.candidates) {
        Json tp = Json::array(), passed = Json::array();
        for (std::size_t i = 0; i < c.test_points.size(); ++i) {
            tp.push_back(xyz(c.test_points[i]));
            passed.push_back(c.passed[i]);
        }
        cands.push_back({{"anchor", xyz(c.anchor)}, {"test_points", tp}, {"passed", passed}, {"accepted", c.accepted}});
    }
    j["candidates"] = cands;
    const auto& pose = sw.decision.pose;
    if (pose)
        j["pose"] = {{"position", xyz(pose->position)},
                     {"e_x", xyz(pose->e_x)},
                     {"e_y", xyz(pose->e_y)},
                     {"e_z", xyz(pose->e_z)}};
    else
        j["pose"] = nullptr;
    j["height"] = {{"centroid_base", sw.centroid_base ? xyz(*sw.centroid_base) : Json(nullptr)},
                   {"base_height", w.base_height},
                   {"tolerance", w.height_tol}};
    j["s_pa"] = sw.decision.s_pa;
    j["s_am"] = sw.decision.s_am;
    j["s_hc"] = sw.decision.s_hc;
    j["mode"] = std::string(to_string(sw.decision.mode));

    // Drawing basis: the pose axes, else any basis of the plane, else camera xy.
    Point3 origin = Point3::Zero(), e1 = Point3::UnitX(), e2 = Point3::UnitY();
    if (pose) {
        origin = pose->position;
        e1 = pose->e_x;
        e2 = pose->e_y;
    } else if (sw.plane) {
        const Point3 n = sw.plane->normal;
        origin = sw.plane->centroid;
        Eigen::Index k = 0;
        n.cwiseAbs().minCoeff(&k);
        e1 = n.cross(Point3::Unit(k)).normalized();
        e2 = n.cross(e1);
    }
    j["view"] = {{"origin", xyz(origin)}, {"e1", xyz(e1)}, {"e2", xyz(e2)}};

    RunOutput out;
    out.artifacts.push_back({"switching.json", dump(j)});
    out.artifacts.push_back({"switching.svg", render_switching_svg(j)});
    return out;
}

SolveResult solve_graph(const std::filesystem::path& edge_list, const std::string& from, const std::string& to,
                        bool with_oracle)
{
    std::ifstream in(edge_list);
    if (!in)
        throw Error(Errc::IOError, "cannot open edge list " + edge_list.string());
    SolveResult r;
    r.graph = parse_edge_list(in);
    const int s = r.graph.id_of(from), t = r.graph.id_of(to);
    r.route = vocpp(r.graph, s, t);
    if (with_oracle) {
        try {
            r.oracle = brute_force_ocpp(r.graph, s, t);
        } catch (const Error& e) {
            if (e.code() != Errc::TooLarge)
                throw;
            r.oracle_message = e.what();
        }
    }
    return r;
}

Json solve_json(const SolveResult& r, const std::string& from, const std::string& to)
{
    Json j = {{"schema_version", kSchemaVersion}, {"artifact", "route"}};
    j["v_s"] = from;
    j["v_t"] = to;
    j["provenance"] = std::string(to_string(r.route.provenance));
    Json walk = Json::array();
    for (int v : r.route.walk)
        walk.push_back(r.graph.name(v));
    j["walk"] = walk;
    Json steps = Json::array();
    for (std::size_t k = 0; k < r.route.edge_sequence.size(); ++k) {
        const auto e = static_cast<std::size_t>(r.route.base_edge_sequence[k]);
        steps.push_back({{"step", k},
                         {"u", r.graph.name(r.route.walk[k])},
                         {"v", r.graph.name(r.route.walk[k + 1])},
                         {"w", r.graph.edges[e].w},
                         {"base_edge", e},
                         {"duplicate", r.route.edge_sequence[k] >= static_cast<int>(r.graph.edges.size())}});
    }
    j["steps"] = steps;
    j["edge_visits"] = r.route.edge_visits;
    j["total_length"] = r.route.total_length;
    j["base_weight"] = r.graph.total_weight();
    if (r.oracle) {
        const double gap = r.route.total_length - r.oracle->total_length;
        j["oracle"] = {{"length", r.oracle->total_length},
                       {"gap", gap},
                       {"gap_ratio", r.oracle->total_length > 0.0 ? gap / r.oracle->total_length : 0.0}};
    } else {
        j["oracle"] = nullptr;
    }
    if (!r.oracle_message.empty())
        j["oracle_message"] = r.oracle_message;
    return j;
}

RunOutput synth_artifacts(const PipelineConfig& config, bool plane)
{
    config.validate();
    RunOutput out;
    Json gt = {{"schema_version", kSchemaVersion}, {"artifact", "ground_truth"}};
    gt["seed"] = config.seed;
    PointCloud cloud;
    if (plane) {
        const PlaneSpec ps = plane_spec(config);
        cloud = generate_plane(ps);
        gt["shape"] = "plane";
        gt["spec"] = {{"size_x", ps.size_x},
                      {"size_y", ps.size_y},
                      {"density", ps.density},
                      {"noise_sigma", ps.noise_sigma},
                      {"height", ps.height}};
    } else {
        const StructureSpec spec = structure_spec(config);
        auto [full, truth] = generate(spec);
        std::vector<int> labels = truth.labels;
        cloud = full;
        if (degrading(config)) {
            cloud = degrade(full, config.synthetic.dropout, config.synthetic.range_falloff, degrade_seed(config.seed));
            // The survivors are an ordered subsequence of the full cloud.
            labels.clear();
            std::size_t k = 0;
            for (const auto& p : cloud.points) {
                while (full.points[k] != p)
                    ++k;
                labels.push_back(truth.labels[k++]);
            }
        }
        gt["shape"] = std::string(to_string(spec.shape));
        gt["spec"] = {{"bar_length", spec.bar_length},
                      {"bar_width", spec.bar_width},
                      {"density", spec.density},
                      {"noise_sigma", spec.noise_sigma},
                      {"junction_scale", spec.junction_scale},
                      {"dropout", config.synthetic.dropout},
                      {"range_falloff", config.synthetic.range_falloff}};
        Json pieces = Json::array();
        for (const auto& p : truth.pieces)
            pieces.push_back({{"junction", p.junction},
                              {"center", xy(p.rect.center)},
                              {"axis", xy(p.rect.axis)},
                              {"half_length", p.rect.half_length},
                              {"half_width", p.rect.half_width},
                              {"corners", point_list(p.rect.corners())}});
        gt["pieces"] = pieces;
        Json edges = Json::array();
        for (const auto& [a, b] : truth.graph_edges)
            edges.push_back({a, b});
        gt["graph"] = {{"vertices", point_list(truth.graph_vertices)}, {"edges", edges}};
        gt["labels"] = labels;
    }
    gt["count"] = cloud.size();
    std::ostringstream csv;
    write_cloud_csv(cloud, csv);
    out.artifacts.push_back({"cloud.csv", csv.str()});
    out.artifacts.push_back({"ground_truth.json", dump(gt)});
    return out;
}

void write_artifacts(const RunOutput& out, const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error(Errc::IOError, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& a : out.artifacts) {
        const auto path = dir / a.name;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw Error(Errc::IOError, "cannot write " + path.string());
        f << a.content;
        if (!f)
            throw Error(Errc::IOError, "failed writing " + path.string());
    }
}

} // namespace bridgenav
