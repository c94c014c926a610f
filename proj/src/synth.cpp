#include "bridgenav/synth.hpp"

#include "bridgenav/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace bridgenav {

std::string_view to_string(Shape s)
{
    switch (s) {
    case Shape::Cross: return "cross";
    case Shape::K: return "k";
    case Shape::L: return "l";
    case Shape::T: return "t";
    case Shape::I: return "i";
    }
    return "l";
}

std::optional<Shape> parse_shape(std::string_view name)
{
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (Shape s : {Shape::Cross, Shape::K, Shape::L, Shape::T, Shape::I})
        if (lower == to_string(s))
            return s;
    return std::nullopt;
}

void StructureSpec::validate() const
{
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(bar_length) || !positive(bar_width))
        throw Error(Errc::InvalidSpec, "bar dimensions must be positive");
    if (!positive(density))
        throw Error(Errc::InvalidSpec, "density must be positive");
    if (!std::isfinite(noise_sigma) || noise_sigma < 0.0)
        throw Error(Errc::InvalidSpec, "noise_sigma must be non-negative");
    if (!positive(junction_scale))
        throw Error(Errc::InvalidSpec, "junction_scale must be positive");
}

bool Rect::contains(const Point2& p) const
{
    const Point2 d = p - center;
    const Point2 across(-axis.y(), axis.x());
    return std::abs(d.dot(axis)) <= half_length + 1e-12 && std::abs(d.dot(across)) <= half_width + 1e-12;
}

std::vector<Point2> Rect::corners() const
{
    const Point2 a = half_length * axis;
    const Point2 b = half_width * Point2(-axis.y(), axis.x());
    return {center - a - b, center + a - b, center + a + b, center - a + b};
}

namespace {

struct Bar {
    Rect rect;
    /// Junction piece at the -axis / +axis end, or -1 for a free end.
    int attach0 = -1;
    int attach1 = -1;
};

struct Layout {
    std::vector<Rect> junctions;
    std::vector<Bar> bars;
};

Rect square(const Point2& c, double side)
{
    return {c, Point2::UnitX(), side / 2.0, side / 2.0};
}

// Bar whose -axis end sits at `anchor`.
Bar bar_from(const Point2& anchor, const Point2& axis, double length, double width, int attach0, int attach1 = -1)
{
    const Point2 dir = axis.normalized();
    return {{anchor + dir * (length / 2.0), dir, length / 2.0, width / 2.0}, attach0, attach1};
}

Layout layout(const StructureSpec& s)
{
    const double w = s.bar_width, L = s.bar_length, J = s.junction_scale * w, h = J / 2.0;
    const Point2 E = Point2::UnitX(), N = Point2::UnitY();
    Layout out;
    out.junctions.push_back(square(Point2::Zero(), J));
    switch (s.shape) {
    case Shape::Cross:
        out.bars = {bar_from({h, 0}, E, L, w, 0), bar_from({0, h}, N, L, w, 0), bar_from({-h, 0}, -E, L, w, 0),
                    bar_from({0, -h}, -N, L, w, 0)};
        break;
    case Shape::L:
        out.bars = {bar_from({h, 0}, E, L, w, 0), bar_from({0, h}, N, L, w, 0)};
        break;
    case Shape::T:
        out.bars = {bar_from({-h, 0}, -E, L, w, 0), bar_from({h, 0}, E, L, w, 0), bar_from({0, -h}, -N, L, w, 0)};
        break;
    case Shape::K: {
        const double c = std::numbers::sqrt2 / 2.0;
        out.bars = {bar_from({0, h}, N, L, w, 0), bar_from({0, -h}, -N, L, w, 0),
                    bar_from({h, J / 4.0}, {c, c}, L, w, 0), bar_from({h, -J / 4.0}, {c, -c}, L, w, 0)};
        break;
    }
    case Shape::I:
        out.junctions.push_back(square({0, J + L}, J));
        out.bars = {bar_from({0, h}, N, L, w, 0, 1), bar_from({h, 0}, E, L / 2.0, w, 0),
                    bar_from({-h, 0}, -E, L / 2.0, w, 0), bar_from({h, J + L}, E, L / 2.0, w, 1),
                    bar_from({-h, J + L}, -E, L / 2.0, w, 1)};
        break;
    }
    return out;
}

} // namespace

std::pair<PointCloud, GroundTruth> generate(const StructureSpec& spec)
{
    spec.validate();
    const Layout lay = layout(spec);
    GroundTruth gt;
    for (const auto& j : lay.junctions)
        gt.pieces.push_back({j, true});
    for (const auto& b : lay.bars)
        gt.pieces.push_back({b.rect, false});

    for (const auto& p : gt.pieces)
        gt.graph_vertices.push_back(p.rect.center);
    const int n_junctions = static_cast<int>(lay.junctions.size());
    for (std::size_t i = 0; i < lay.bars.size(); ++i) {
        const Bar& b = lay.bars[i];
        const int bar_vertex = n_junctions + static_cast<int>(i);
        const Point2 ends[2] = {b.rect.center - b.rect.axis * b.rect.half_length,
                                b.rect.center + b.rect.axis * b.rect.half_length};
        const int attach[2] = {b.attach0, b.attach1};
        for (int e = 0; e < 2; ++e) {
            const int id = static_cast<int>(gt.graph_vertices.size());
            gt.graph_vertices.push_back(ends[e]);
            if (attach[e] >= 0)
                gt.graph_edges.emplace_back(attach[e], id);
            gt.graph_edges.emplace_back(id, bar_vertex);
        }
    }

    PointCloud cloud;
    cloud.frame = Frame::Camera;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < gt.pieces.size(); ++i) {
        const Rect& r = gt.pieces[i].rect;
        const Point2 across(-r.axis.y(), r.axis.x());
        const auto count = static_cast<std::size_t>(std::llround(spec.density * r.area()));
        for (std::size_t k = 0; k < count; ++k) {
            const Point2 p = r.center + unit(rng) * r.half_length * r.axis + unit(rng) * r.half_width * across;
            const bool earlier = std::any_of(gt.pieces.begin(), gt.pieces.begin() + static_cast<std::ptrdiff_t>(i),
                                             [&](const TruePiece& q) { return q.rect.contains(p); });
            if (earlier)
                continue;
            Point3 q(p.x(), p.y(), 0.0);
            if (spec.noise_sigma > 0.0) {
                q.x() += spec.noise_sigma * noise(rng);
                q.y() += spec.noise_sigma * noise(rng);
            }
            cloud.points.push_back(q);
            gt.labels.push_back(static_cast<int>(i));
        }
    }
    return {std::move(cloud), std::move(gt)};
}

PointCloud degrade(const PointCloud& cloud, double dropout, double range_falloff, std::uint64_t seed)
{
    if (!(dropout >= 0.0 && dropout <= 1.0))
        throw Error(Errc::InvalidArgument, "dropout must lie in [0, 1]");
    if (!(range_falloff >= 0.0) || !std::isfinite(range_falloff))
        throw Error(Errc::InvalidArgument, "range_falloff must be non-negative");
    PointCloud out;
    out.frame = cloud.frame;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& p : cloud.points) {
        const double drop = std::clamp(dropout + range_falloff * std::max(0.0, p.x()), 0.0, 1.0);
        if (unit(rng) >= drop)
            out.points.push_back(p);
    }
    return out;
}

PointCloud generate_plane(const PlaneSpec& spec)
{
    if (!(spec.size_x > 0.0) || !(spec.size_y > 0.0) || !(spec.density > 0.0) || !(spec.noise_sigma >= 0.0))
        throw Error(Errc::InvalidSpec, "plane dimensions, density and noise must be positive");
    PointCloud cloud;
    cloud.frame = Frame::Camera;
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> unit(-0.5, 0.5);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto count = static_cast<std::size_t>(std::llround(spec.density * spec.size_x * spec.size_y));
    for (std::size_t k = 0; k < count; ++k) {
        Point3 p(unit(rng) * spec.size_x, unit(rng) * spec.size_y, spec.height);
        if (spec.noise_sigma > 0.0)
            p.z() += spec.noise_sigma * noise(rng);
        cloud.points.push_back(p);
    }
    return cloud;
}

} // namespace bridgenav
