#include "bridgenav/config.hpp"

#include "bridgenav/error.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace bridgenav {

using json = nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw Error(Errc::InvalidConfig, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key)
{
    return path.empty() ? key : path + "." + key;
}

void read_value(const json& v, const std::string& path, double& out)
{
    if (!v.is_number())
        fail(path, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out))
        fail(path, "must be finite");
}

void read_value(const json& v, const std::string& path, int& out)
{
    if (!v.is_number_integer())
        fail(path, "expected an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
        fail(path, "integer out of range");
    out = static_cast<int>(x);
}

void read_value(const json& v, const std::string& path, std::uint64_t& out)
{
    if (!v.is_number_unsigned())
        fail(path, "expected a non-negative integer");
    out = v.get<std::uint64_t>();
}

void read_value(const json& v, const std::string& path, std::string& out)
{
    if (!v.is_string())
        fail(path, "expected a string");
    out = v.get<std::string>();
}

template <class T>
void read_value(const json& v, const std::string& path, std::optional<T>& out)
{
    if (v.is_null()) {
        out.reset();
        return;
    }
    T x{};
    read_value(v, path, x);
    out = x;
}

// Object view that remembers which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object())
            fail(path_.empty() ? "<root>" : path_, "expected an object");
    }

    template <class T>
    void get(const std::string& key, T& out)
    {
        if (const json* v = find(key))
            read_value(*v, join(path_, key), out);
    }

    const json* find(const std::string& key)
    {
        auto it = j_.find(key);
        if (it == j_.end())
            return nullptr;
        seen_.insert(key);
        return &*it;
    }

    std::string path(const std::string& key) const { return join(path_, key); }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                fail(join(path_, it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string format_name(CloudFormat f)
{
    switch (f) {
    case CloudFormat::Csv: return "csv";
    case CloudFormat::PcdAscii: return "pcd";
    case CloudFormat::PlyAscii: return "ply";
    }
    return "csv";
}

std::string axis_name(Axis a)
{
    return std::string(1, "xyz"[static_cast<int>(a)]);
}

std::string rule_name(InsideRule r)
{
    return r == InsideRule::All ? "all" : "any";
}

template <class Enum, class Names>
Enum read_enum(Reader& r, const std::string& key, Enum current, const Names& names)
{
    const json* v = r.find(key);
    if (!v)
        return current;
    if (!v->is_string())
        fail(r.path(key), "expected a string");
    const auto s = v->get<std::string>();
    for (const auto& [name, value] : names)
        if (s == name)
            return value;
    fail(r.path(key), "unrecognised value \"" + s + "\"");
}

const std::vector<std::pair<std::string, CloudFormat>> kFormats = {
    {"csv", CloudFormat::Csv}, {"pcd", CloudFormat::PcdAscii}, {"ply", CloudFormat::PlyAscii}};
const std::vector<std::pair<std::string, Axis>> kAxes = {{"x", Axis::X}, {"y", Axis::Y}, {"z", Axis::Z}};
const std::vector<std::pair<std::string, InsideRule>> kRules = {{"all", InsideRule::All}, {"any", InsideRule::Any}};
const std::vector<std::pair<std::string, Shape>> kShapes = {
    {"cross", Shape::Cross}, {"k", Shape::K}, {"l", Shape::L}, {"t", Shape::T}, {"i", Shape::I}};

RigidTransform read_transform(const json& j, const std::string& path)
{
    Reader r(j, path);
    Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
    Point3 t = Point3::Zero();
    if (const json* rot = r.find("rotation")) {
        const std::string p = r.path("rotation");
        if (!rot->is_array() || rot->size() != 3)
            fail(p, "expected a 3x3 array");
        for (int i = 0; i < 3; ++i) {
            const json& row = (*rot)[static_cast<std::size_t>(i)];
            if (!row.is_array() || row.size() != 3)
                fail(p, "expected a 3x3 array");
            for (int k = 0; k < 3; ++k)
                read_value(row[static_cast<std::size_t>(k)], p, R(i, k));
        }
    }
    if (const json* tr = r.find("translation")) {
        const std::string p = r.path("translation");
        if (!tr->is_array() || tr->size() != 3)
            fail(p, "expected an array of 3 numbers");
        for (int i = 0; i < 3; ++i)
            read_value((*tr)[static_cast<std::size_t>(i)], p, t(i));
    }
    r.finish();
    try {
        return RigidTransform(R, t);
    } catch (const Error& e) {
        fail(path, e.what());
    }
}

void require(bool ok, const std::string& path, const std::string& what)
{
    if (!ok)
        fail(path, what);
}

} // namespace

void PipelineConfig::validate() const
{
    require(schema_version == kSchemaVersion, "schema_version", "unsupported version");
    const auto& s = synthetic;
    require(s.bar_length > 0.0, "synthetic.bar_length", "must be positive");
    require(s.bar_width > 0.0, "synthetic.bar_width", "must be positive");
    require(s.density > 0.0, "synthetic.density", "must be positive");
    require(s.noise_sigma >= 0.0, "synthetic.noise_sigma", "must be non-negative");
    require(s.junction_scale > 0.0, "synthetic.junction_scale", "must be positive");
    require(s.dropout >= 0.0 && s.dropout <= 1.0, "synthetic.dropout", "must lie in [0, 1]");
    require(s.range_falloff >= 0.0, "synthetic.range_falloff", "must be non-negative");
    require(plane.size_x > 0.0, "plane.size_x", "must be positive");
    require(plane.size_y > 0.0, "plane.size_y", "must be positive");
    require(plane.density > 0.0, "plane.density", "must be positive");
    require(plane.noise_sigma >= 0.0, "plane.noise_sigma", "must be non-negative");
    for (std::size_t i = 0; i < cloud.passthrough.size(); ++i)
        require(cloud.passthrough[i].min <= cloud.passthrough[i].max,
                "cloud.passthrough[" + std::to_string(i) + "]", "min must not exceed max");
    require(!cloud.voxel_leaf || *cloud.voxel_leaf > 0.0, "cloud.voxel_leaf", "must be positive");
    require(!boundary.alpha_s || *boundary.alpha_s > 0.0, "boundary.alpha_s", "must be positive");
    require(!boundary.eps_border || *boundary.eps_border > 0.0, "boundary.eps_border", "must be positive");
    require(!boundary.l_b || *boundary.l_b > 0.0, "boundary.l_b", "must be positive");
    require(segmentation.n_cmin >= 1, "segmentation.n_cmin", "must be at least 1");
    require(segmentation.n_cmax >= segmentation.n_cmin, "segmentation.n_cmax", "must be at least n_cmin");
    require(segmentation.n_cmax <= 32, "segmentation.n_cmax", "must be at most 32");
    require(segmentation.em.max_iter >= 1, "segmentation.em_max_iter", "must be at least 1");
    require(segmentation.em.rel_tol > 0.0, "segmentation.em_rel_tol", "must be positive");
    require(segmentation.em.restarts >= 1, "segmentation.em_restarts", "must be at least 1");
    require(!graph.d_min || *graph.d_min >= 0.0, "graph.d_min", "must be non-negative");
    require(!route.v_s || *route.v_s >= 0, "route.v_s", "must be non-negative");
    require(!route.v_t || *route.v_t >= 0, "route.v_t", "must be non-negative");
    require(footprint.width > 0.0, "footprint.width", "must be positive");
    require(footprint.length > 0.0, "footprint.length", "must be positive");
    require(!planner.step || *planner.step > 0.0, "planner.step", "must be positive");
    require(!planner.goal_tol || *planner.goal_tol > 0.0, "planner.goal_tol", "must be positive");
    require(planner.theta_step > 0.0, "planner.theta_step", "must be positive");
    require(planner.goal_bias >= 0.0 && planner.goal_bias <= 1.0, "planner.goal_bias", "must lie in [0, 1]");
    require(planner.max_iters >= 1, "planner.max_iters", "must be at least 1");
    require(planner.theta_weight >= 0.0, "planner.theta_weight", "must be non-negative");
    require(planner.n_candidates >= 1, "planner.n_candidates", "must be at least 1");
    require(planner.m >= 1, "planner.m", "must be at least 1");
    const auto& w = switching;
    require(w.ransac_dist_thresh > 0.0, "switching.ransac_dist_thresh", "must be positive");
    require(w.ransac_max_iters >= 1, "switching.ransac_max_iters", "must be at least 1");
    require(w.min_inlier_fraction >= 0.0 && w.min_inlier_fraction <= 1.0, "switching.min_inlier_fraction",
            "must lie in [0, 1]");
    require(w.foot.width > 0.0, "switching.foot.width", "must be positive");
    require(w.foot.length > 0.0, "switching.foot.length", "must be positive");
    require(w.foot.t >= 0.0, "switching.foot.t", "must be non-negative");
    require(w.foot.n >= 1, "switching.foot.n", "must be at least 1");
    require(w.foot.m >= 1, "switching.foot.m", "must be at least 1");
    require(w.alpha_s > 0.0, "switching.alpha_s", "must be positive");
    require(w.height_tol >= 0.0, "switching.height_tol", "must be non-negative");
}

PipelineConfig config_from_json(const json& j)
{
    PipelineConfig c;
    Reader root(j, "");
    root.get("schema_version", c.schema_version);
    root.get("input", c.input);
    if (const json* f = root.find("input_format"); f && !f->is_null()) {
        if (!f->is_string())
            fail("input_format", "expected a string");
        const auto s = f->get<std::string>();
        bool found = false;
        for (const auto& [name, value] : kFormats)
            if (s == name) {
                c.input_format = value;
                found = true;
            }
        if (!found)
            fail("input_format", "unrecognised value \"" + s + "\"");
    }
    root.get("seed", c.seed);

    if (const json* v = root.find("synthetic")) {
        Reader r(*v, "synthetic");
        auto& s = c.synthetic;
        s.shape = read_enum(r, "shape", s.shape, kShapes);
        r.get("bar_length", s.bar_length);
        r.get("bar_width", s.bar_width);
        r.get("density", s.density);
        r.get("noise_sigma", s.noise_sigma);
        r.get("junction_scale", s.junction_scale);
        r.get("dropout", s.dropout);
        r.get("range_falloff", s.range_falloff);
        r.finish();
    }
    if (const json* v = root.find("plane")) {
        Reader r(*v, "plane");
        r.get("size_x", c.plane.size_x);
        r.get("size_y", c.plane.size_y);
        r.get("density", c.plane.density);
        r.get("noise_sigma", c.plane.noise_sigma);
        r.get("height", c.plane.height);
        r.finish();
    }
    if (const json* v = root.find("cloud")) {
        Reader r(*v, "cloud");
        if (const json* t = r.find("camera_to_base"))
            c.cloud.camera_to_base = read_transform(*t, "cloud.camera_to_base");
        if (const json* p = r.find("passthrough")) {
            if (!p->is_array())
                fail("cloud.passthrough", "expected an array");
            for (std::size_t i = 0; i < p->size(); ++i) {
                Reader e((*p)[i], "cloud.passthrough[" + std::to_string(i) + "]");
                PipelineConfig::Passthrough pt;
                pt.axis = read_enum(e, "axis", pt.axis, kAxes);
                if (!e.find("min") || !e.find("max"))
                    fail(e.path("min"), "min and max are required");
                e.get("min", pt.min);
                e.get("max", pt.max);
                e.finish();
                c.cloud.passthrough.push_back(pt);
            }
        }
        r.get("voxel_leaf", c.cloud.voxel_leaf);
        r.finish();
    }
    if (const json* v = root.find("boundary")) {
        Reader r(*v, "boundary");
        r.get("alpha_s", c.boundary.alpha_s);
        r.get("eps_border", c.boundary.eps_border);
        r.get("l_b", c.boundary.l_b);
        c.boundary.inside_rule = read_enum(r, "inside_rule", c.boundary.inside_rule, kRules);
        r.finish();
    }
    if (const json* v = root.find("segmentation")) {
        Reader r(*v, "segmentation");
        r.get("n_cmin", c.segmentation.n_cmin);
        r.get("n_cmax", c.segmentation.n_cmax);
        r.get("em_max_iter", c.segmentation.em.max_iter);
        r.get("em_rel_tol", c.segmentation.em.rel_tol);
        r.get("em_restarts", c.segmentation.em.restarts);
        r.finish();
    }
    if (const json* v = root.find("graph")) {
        Reader r(*v, "graph");
        r.get("d_min", c.graph.d_min);
        r.finish();
    }
    if (const json* v = root.find("route")) {
        Reader r(*v, "route");
        r.get("v_s", c.route.v_s);
        r.get("v_t", c.route.v_t);
        r.finish();
    }
    if (const json* v = root.find("footprint")) {
        Reader r(*v, "footprint");
        r.get("width", c.footprint.width);
        r.get("length", c.footprint.length);
        r.finish();
    }
    if (const json* v = root.find("planner")) {
        Reader r(*v, "planner");
        auto& p = c.planner;
        r.get("step", p.step);
        r.get("goal_tol", p.goal_tol);
        r.get("theta_step", p.theta_step);
        r.get("goal_bias", p.goal_bias);
        r.get("max_iters", p.max_iters);
        r.get("theta_weight", p.theta_weight);
        r.get("n_candidates", p.n_candidates);
        r.get("m", p.m);
        r.finish();
    }
    if (const json* v = root.find("switching")) {
        Reader r(*v, "switching");
        auto& w = c.switching;
        r.get("ransac_dist_thresh", w.ransac_dist_thresh);
        r.get("ransac_max_iters", w.ransac_max_iters);
        r.get("min_inlier_fraction", w.min_inlier_fraction);
        if (const json* f = r.find("foot")) {
            Reader fr(*f, "switching.foot");
            fr.get("width", w.foot.width);
            fr.get("length", w.foot.length);
            fr.get("t", w.foot.t);
            fr.get("n", w.foot.n);
            fr.get("m", w.foot.m);
            fr.finish();
        }
        r.get("alpha_s", w.alpha_s);
        r.get("base_height", w.base_height);
        r.get("height_tol", w.height_tol);
        r.finish();
    }
    root.finish();
    c.validate();
    return c;
}

namespace {

template <class T>
json opt(const std::optional<T>& v)
{
    return v ? json(*v) : json(nullptr);
}

} // namespace

json config_to_json(const PipelineConfig& c)
{
    json j;
    j["schema_version"] = c.schema_version;
    j["input"] = opt(c.input);
    j["input_format"] = c.input_format ? json(format_name(*c.input_format)) : json(nullptr);
    j["seed"] = c.seed;
    const auto& s = c.synthetic;
    j["synthetic"] = {{"shape", std::string(to_string(s.shape))},
                      {"bar_length", s.bar_length},
                      {"bar_width", s.bar_width},
                      {"density", s.density},
                      {"noise_sigma", s.noise_sigma},
                      {"junction_scale", s.junction_scale},
                      {"dropout", s.dropout},
                      {"range_falloff", s.range_falloff}};
    j["plane"] = {{"size_x", c.plane.size_x},
                  {"size_y", c.plane.size_y},
                  {"density", c.plane.density},
                  {"noise_sigma", c.plane.noise_sigma},
                  {"height", c.plane.height}};
    json rot = json::array();
    const auto& R = c.cloud.camera_to_base.rotation();
    for (int i = 0; i < 3; ++i)
        rot.push_back({R(i, 0), R(i, 1), R(i, 2)});
    const auto& t = c.cloud.camera_to_base.translation();
    json pass = json::array();
    for (const auto& p : c.cloud.passthrough)
        pass.push_back({{"axis", axis_name(p.axis)}, {"min", p.min}, {"max", p.max}});
    j["cloud"] = {{"camera_to_base", {{"rotation", rot}, {"translation", {t.x(), t.y(), t.z()}}}},
                  {"passthrough", pass},
                  {"voxel_leaf", opt(c.cloud.voxel_leaf)}};
    j["boundary"] = {{"alpha_s", opt(c.boundary.alpha_s)},
                     {"eps_border", opt(c.boundary.eps_border)},
                     {"l_b", opt(c.boundary.l_b)},
                     {"inside_rule", rule_name(c.boundary.inside_rule)}};
    j["segmentation"] = {{"n_cmin", c.segmentation.n_cmin},
                         {"n_cmax", c.segmentation.n_cmax},
                         {"em_max_iter", c.segmentation.em.max_iter},
                         {"em_rel_tol", c.segmentation.em.rel_tol},
                         {"em_restarts", c.segmentation.em.restarts}};
    j["graph"] = {{"d_min", opt(c.graph.d_min)}};
    j["route"] = {{"v_s", opt(c.route.v_s)}, {"v_t", opt(c.route.v_t)}};
    j["footprint"] = {{"width", c.footprint.width}, {"length", c.footprint.length}};
    const auto& p = c.planner;
    j["planner"] = {{"step", opt(p.step)},
                    {"goal_tol", opt(p.goal_tol)},
                    {"theta_step", p.theta_step},
                    {"goal_bias", p.goal_bias},
                    {"max_iters", p.max_iters},
                    {"theta_weight", p.theta_weight},
                    {"n_candidates", p.n_candidates},
                    {"m", p.m}};
    const auto& w = c.switching;
    j["switching"] = {{"ransac_dist_thresh", w.ransac_dist_thresh},
                      {"ransac_max_iters", w.ransac_max_iters},
                      {"min_inlier_fraction", w.min_inlier_fraction},
                      {"foot",
                       {{"width", w.foot.width},
                        {"length", w.foot.length},
                        {"t", w.foot.t},
                        {"n", w.foot.n},
                        {"m", w.foot.m}}},
                      {"alpha_s", w.alpha_s},
                      {"base_height", w.base_height},
                      {"height_tol", w.height_tol}};
    return j;
}

PipelineConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::IOError, "cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(Errc::InvalidConfig, path.string() + ": " + e.what());
    }
    return config_from_json(j);
}

} // namespace bridgenav
