#include "bridgenav/cloud.hpp"

#include "bridgenav/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>

namespace bridgenav {

std::string_view to_string(Frame f)
{
    switch (f) {
    case Frame::Camera: return "camera";
    case Frame::RobotBase: return "robot_base";
    case Frame::Projected2D: return "projected_2d";
    }
    return "unknown";
}

CloudFormat format_from_extension(const std::filesystem::path& path)
{
    std::string ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".csv" || ext == ".txt")
        return CloudFormat::Csv;
    if (ext == ".pcd")
        return CloudFormat::PcdAscii;
    if (ext == ".ply")
        return CloudFormat::PlyAscii;
    throw Error(Errc::ParseError, "unrecognised cloud extension '" + ext + "'");
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, bool comma)
{
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (comma) {
            const auto j = s.find(',', i);
            out.push_back(trim(s.substr(i, j == std::string_view::npos ? j : j - i)));
            if (j == std::string_view::npos)
                break;
            i = j + 1;
        } else {
            while (i < s.size() && (s[i] == ' ' || s[i] == '\t'))
                ++i;
            if (i >= s.size())
                break;
            auto j = i;
            while (j < s.size() && s[j] != ' ' && s[j] != '\t')
                ++j;
            out.push_back(s.substr(i, j - i));
            i = j;
        }
    }
    return out;
}

double parse_double(std::string_view tok, std::size_t line_no)
{
    double v = 0.0;
    // from_chars rejects a leading '+'
    if (!tok.empty() && tok.front() == '+')
        tok.remove_prefix(1);
    const auto* end = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad number '" +
                                          std::string(tok) + "'");
    return v;
}

Point3 finite_point(double x, double y, double z, std::size_t line_no)
{
    if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        throw Error(Errc::ParseError,
                    "line " + std::to_string(line_no) + ": non-finite coordinate");
    return {x, y, z};
}

PointCloud read_csv(std::istream& in)
{
    PointCloud cloud;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        const auto tok = split(s, true);
        if (tok.size() != 3)
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                              ": expected 3 comma-separated values");
        cloud.points.push_back(finite_point(parse_double(tok[0], line_no), parse_double(tok[1], line_no),
                                            parse_double(tok[2], line_no), line_no));
    }
    return cloud;
}

PointCloud read_pcd(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> fields;
    long long declared = -1;
    bool ascii = false;
    while (std::getline(in, line)) {
        ++line_no;
        const auto s = trim(line);
        if (s.empty() || s.front() == '#')
            continue;
        const auto tok = split(s, false);
        const auto key = tok.front();
        if (key == "FIELDS") {
            fields.assign(tok.begin() + 1, tok.end());
        } else if (key == "COUNT") {
            for (std::size_t i = 1; i < tok.size(); ++i)
                if (tok[i] != "1")
                    throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                                      ": multi-count PCD fields are not supported");
        } else if (key == "POINTS") {
            declared = static_cast<long long>(parse_double(tok.at(1), line_no));
        } else if (key == "DATA") {
            if (tok.size() < 2 || tok[1] != "ascii")
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                                  ": only DATA ascii is supported");
            ascii = true;
            break;
        }
    }
    if (!ascii)
        throw Error(Errc::ParseError, "PCD header lacks a DATA line");
    auto col = [&](const char* name) {
        auto it = std::find(fields.begin(), fields.end(), name);
        if (it == fields.end())
            throw Error(Errc::ParseError, std::string("PCD FIELDS lacks '") + name + "'");
        return static_cast<std::size_t>(it - fields.begin());
    };
    const std::size_t cx = col("x"), cy = col("y"), cz = col("z");

    PointCloud cloud;
    while (std::getline(in, line)) {
        ++line_no;
        const auto s = trim(line);
        if (s.empty())
            continue;
        const auto tok = split(s, false);
        if (tok.size() != fields.size())
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected " +
                                              std::to_string(fields.size()) + " values");
        cloud.points.push_back(finite_point(parse_double(tok[cx], line_no), parse_double(tok[cy], line_no),
                                            parse_double(tok[cz], line_no), line_no));
    }
    if (declared >= 0 && static_cast<std::size_t>(declared) != cloud.points.size())
        throw Error(Errc::ParseError, "PCD declares " + std::to_string(declared) + " points, found " +
                                          std::to_string(cloud.points.size()));
    return cloud;
}

PointCloud read_ply(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line) || trim(line) != "ply")
        throw Error(Errc::ParseError, "line 1: missing 'ply' magic");
    ++line_no;
    long long vertex_count = -1;
    bool in_vertex = false, ascii = false, header_done = false;
    std::vector<std::string> props;
    while (std::getline(in, line)) {
        ++line_no;
        const auto tok = split(trim(line), false);
        if (tok.empty())
            continue;
        if (tok[0] == "format") {
            if (tok.size() < 2 || tok[1] != "ascii")
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                                  ": only ascii PLY is supported");
            ascii = true;
        } else if (tok[0] == "element") {
            in_vertex = tok.size() >= 3 && tok[1] == "vertex";
            if (in_vertex)
                vertex_count = static_cast<long long>(parse_double(tok[2], line_no));
        } else if (tok[0] == "property" && in_vertex) {
            if (tok.size() != 3)
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) +
                                                  ": list properties on vertices are not supported");
            props.emplace_back(tok[2]);
        } else if (tok[0] == "end_header") {
            header_done = true;
            break;
        }
    }
    if (!header_done || !ascii || vertex_count < 0)
        throw Error(Errc::ParseError, "incomplete PLY header");
    auto col = [&](const char* name) {
        auto it = std::find(props.begin(), props.end(), name);
        if (it == props.end())
            throw Error(Errc::ParseError, std::string("PLY vertex lacks property '") + name + "'");
        return static_cast<std::size_t>(it - props.begin());
    };
    const std::size_t cx = col("x"), cy = col("y"), cz = col("z");

    PointCloud cloud;
    while (cloud.points.size() < static_cast<std::size_t>(vertex_count) && std::getline(in, line)) {
        ++line_no;
        const auto tok = split(trim(line), false);
        if (tok.empty())
            continue;
        if (tok.size() < props.size())
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": short vertex row");
        cloud.points.push_back(finite_point(parse_double(tok[cx], line_no), parse_double(tok[cy], line_no),
                                            parse_double(tok[cz], line_no), line_no));
    }
    if (cloud.points.size() != static_cast<std::size_t>(vertex_count))
        throw Error(Errc::ParseError, "PLY ended before all vertices were read");
    return cloud;
}

} // namespace

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::IOError, "cannot open '" + path.string() + "'");
    PointCloud cloud;
    switch (format) {
    case CloudFormat::Csv: cloud = read_csv(in); break;
    case CloudFormat::PcdAscii: cloud = read_pcd(in); break;
    case CloudFormat::PlyAscii: cloud = read_ply(in); break;
    }
    cloud.frame = Frame::Camera;
    return cloud;
}

void write_cloud_csv(const PointCloud& cloud, std::ostream& out)
{
    const auto old = out.precision(17);
    out << "# x,y,z\n";
    for (const auto& p : cloud.points)
        out << p.x() << ',' << p.y() << ',' << p.z() << '\n';
    out.precision(old);
}

void save_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out)
        throw Error(Errc::IOError, "cannot write '" + path.string() + "'");
    write_cloud_csv(cloud, out);
}

PointCloud passthrough_filter(const PointCloud& cloud, Axis axis, double lo, double hi)
{
    if (!(lo <= hi))
        throw Error(Errc::InvalidRange, "passthrough lo > hi");
    PointCloud out;
    out.frame = cloud.frame;
    const auto a = static_cast<int>(axis);
    for (const auto& p : cloud.points)
        if (p[a] >= lo && p[a] <= hi)
            out.points.push_back(p);
    return out;
}

PointCloud voxel_downsample(const PointCloud& cloud, double leaf)
{
    if (!(leaf > 0.0) || !std::isfinite(leaf))
        throw Error(Errc::InvalidLeaf, "voxel leaf must be positive");

    using Key = std::tuple<long long, long long, long long>;
    struct KeyHash {
        std::size_t operator()(const Key& k) const noexcept
        {
            const auto [a, b, c] = k;
            std::size_t h = static_cast<std::size_t>(a) * 73856093u;
            h ^= static_cast<std::size_t>(b) * 19349663u;
            h ^= static_cast<std::size_t>(c) * 83492791u;
            return h;
        }
    };
    std::unordered_map<Key, std::size_t, KeyHash> slot;
    std::vector<Point3> sums;
    std::vector<std::size_t> counts;
    for (const auto& p : cloud.points) {
        const Key k{static_cast<long long>(std::floor(p.x() / leaf)),
                    static_cast<long long>(std::floor(p.y() / leaf)),
                    static_cast<long long>(std::floor(p.z() / leaf))};
        auto [it, fresh] = slot.try_emplace(k, sums.size());
        if (fresh) {
            sums.push_back(Point3::Zero());
            counts.push_back(0);
        }
        sums[it->second] += p;
        ++counts[it->second];
    }
    PointCloud out;
    out.frame = cloud.frame;
    out.points.reserve(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i)
        out.points.push_back(sums[i] / static_cast<double>(counts[i]));
    return out;
}

namespace {

bool all_collinear(const Points3& pts)
{
    const Point3& a = pts.front();
    std::size_t far = 0;
    double far_d = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        const double d = (pts[i] - a).squaredNorm();
        if (d > far_d) {
            far_d = d;
            far = i;
        }
    }
    if (far_d == 0.0)
        return true;
    const Point3 dir = (pts[far] - a).normalized();
    const double scale = std::sqrt(far_d);
    for (const auto& p : pts)
        if ((p - a).cross(dir).norm() > 1e-12 * scale)
            return false;
    return true;
}

// Canonical sign: first nonzero of (z, y, x) is positive.
Point3 orient(Point3 n)
{
    for (int i : {2, 1, 0}) {
        if (n[i] > 0)
            return n;
        if (n[i] < 0)
            return -n;
    }
    return n;
}

} // namespace

PlanePatch extract_plane_ransac(const PointCloud& cloud, const RansacParams& params)
{
    const auto& pts = cloud.points;
    if (pts.size() < 3 || all_collinear(pts))
        throw Error(Errc::DegenerateCloud, "need at least 3 non-collinear points");

    std::mt19937_64 rng(params.seed);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);

    std::size_t best_count = 0;
    Point3 best_n = Point3::Zero();
    double best_off = 0.0;
    for (int it = 0; it < params.max_iters; ++it) {
        const std::size_t i = pick(rng), j = pick(rng), k = pick(rng);
        if (i == j || j == k || i == k)
            continue;
        Point3 n = (pts[j] - pts[i]).cross(pts[k] - pts[i]);
        const double len = n.norm();
        if (len < 1e-12 * (pts[j] - pts[i]).norm() * (pts[k] - pts[i]).norm() || len == 0.0)
            continue;
        n = orient(n / len);
        const double off = n.dot(pts[i]);
        std::size_t count = 0;
        for (const auto& p : pts)
            if (std::abs(n.dot(p) - off) <= params.dist_thresh)
                ++count;
        if (count > best_count) {
            best_count = count;
            best_n = n;
            best_off = off;
        }
    }
    if (best_count == 0 ||
        static_cast<double>(best_count) < params.min_inlier_fraction * static_cast<double>(pts.size()))
        throw Error(Errc::NoPlane, "best plane holds " + std::to_string(best_count) + " of " +
                                       std::to_string(pts.size()) + " points");

    PlanePatch patch;
    patch.normal = best_n;
    patch.offset = best_off;
    patch.inliers.frame = cloud.frame;
    for (const auto& p : pts)
        if (std::abs(best_n.dot(p) - best_off) <= params.dist_thresh)
            patch.inliers.points.push_back(p);
    patch.centroid = mean_of<3>(patch.inliers.points);
    return patch;
}

RigidTransform::RigidTransform(const Eigen::Matrix3d& rotation, const Point3& translation)
    : rotation_(rotation), translation_(translation)
{
    const double ortho = (rotation.transpose() * rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    if (!(ortho <= 1e-9) || !(std::abs(rotation.determinant() - 1.0) <= 1e-9) ||
        !translation.allFinite())
        throw Error(Errc::InvalidTransform, "rotation must be orthonormal with det +1");
}

RigidTransform RigidTransform::translation(const Point3& t)
{
    return {Eigen::Matrix3d::Identity(), t};
}

RigidTransform RigidTransform::rotation_z(double angle)
{
    Eigen::Matrix3d r;
    r << std::cos(angle), -std::sin(angle), 0, std::sin(angle), std::cos(angle), 0, 0, 0, 1;
    return {r, Point3::Zero()};
}

Point3 transform_point(const Point3& p, const RigidTransform& T)
{
    return T.rotation() * p + T.translation();
}

PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& T, Frame target)
{
    PointCloud out;
    out.frame = target;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points)
        out.points.push_back(transform_point(p, T));
    return out;
}

PointCloud project_to_2d(const PointCloud& cloud)
{
    if (cloud.frame != Frame::RobotBase && cloud.frame != Frame::Projected2D)
        throw Error(Errc::WrongFrame, "projection expects a robot-base cloud");
    PointCloud out;
    out.frame = Frame::Projected2D;
    out.points.reserve(cloud.size());
    for (const auto& p : cloud.points)
        out.points.emplace_back(p.x(), p.y(), 0.0);
    return out;
}

Points2 xy_points(const PointCloud& cloud)
{
    Points2 out;
    out.reserve(cloud.size());
    for (const auto& p : cloud.points)
        out.emplace_back(p.x(), p.y());
    return out;
}

} // namespace bridgenav
