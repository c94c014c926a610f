#include "bridgenav/graph.hpp"

#include "bridgenav/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <limits>
#include <numeric>

namespace bridgenav {

double WeightedGraph::total_weight() const
{
    double s = 0.0;
    for (const auto& e : edges)
        s += e.w;
    return s;
}

std::string WeightedGraph::name(int v) const
{
    if (v >= 0 && static_cast<std::size_t>(v) < names.size())
        return names[static_cast<std::size_t>(v)];
    return std::to_string(v);
}

int WeightedGraph::id_of(std::string_view n) const
{
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n)
            return static_cast<int>(i);
    if (names.empty()) {
        int v = -1;
        const std::string s(n);
        try {
            std::size_t pos = 0;
            v = std::stoi(s, &pos);
            if (pos != s.size())
                v = -1;
        } catch (const std::exception&) {
            v = -1;
        }
        if (v >= 0 && static_cast<std::size_t>(v) < vertex_count)
            return v;
    }
    throw Error(Errc::UnknownVertex, "no vertex named '" + std::string(n) + "'");
}

std::string_view to_string(VertexKind k)
{
    switch (k) {
    case VertexKind::Center: return "center";
    case VertexKind::BorderMid: return "border_mid";
    case VertexKind::BarEnd: return "bar_end";
    }
    return "center";
}

WeightedGraph StructureGraph::weighted() const
{
    WeightedGraph g;
    g.vertex_count = vertices.size();
    g.edges = edges;
    return g;
}

std::size_t count_components(std::size_t vertex_count, const std::vector<WeightedGraph::Edge>& edges)
{
    std::vector<std::size_t> parent(vertex_count);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::size_t comps = vertex_count;
    for (const auto& e : edges) {
        const auto a = find(static_cast<std::size_t>(e.u)), b = find(static_cast<std::size_t>(e.v));
        if (a != b) {
            parent[a] = b;
            --comps;
        }
    }
    return comps;
}

PrincipalLine fit_principal_line(std::span<const Point2> points)
{
    if (points.size() < 2)
        throw Error(Errc::DegenerateCluster, "principal line needs at least two points");
    PrincipalLine line;
    line.point = mean_of<2>(points);
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
    for (const auto& p : points) {
        const Point2 d = p - line.point;
        cov += d * d.transpose();
    }
    cov /= static_cast<double>(points.size());
    if (!(cov.trace() > 0.0))
        throw Error(Errc::DegenerateCluster, "all points coincide");
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cov);
    Point2 dir = es.eigenvectors().col(1).normalized();
    if (dir.x() < 0.0 || (dir.x() == 0.0 && dir.y() < 0.0))
        dir = -dir;
    line.direction = dir;
    line.lambda_major = es.eigenvalues()(1);
    line.lambda_minor = es.eigenvalues()(0);
    return line;
}

std::pair<Point2, Point2> line_boundary_intersections(const PrincipalLine& line, const Boundary& b)
{
    if (b.empty())
        throw Error(Errc::EmptyBoundary, "bar ends of an empty boundary");
    std::size_t lo = 0, hi = 0;
    double lo_t = std::numeric_limits<double>::infinity();
    double hi_t = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < b.points.size(); ++i) {
        const double t = (b.points[i] - line.point).dot(line.direction);
        if (t < lo_t) {
            lo_t = t;
            lo = i;
        }
        if (t > hi_t) {
            hi_t = t;
            hi = i;
        }
    }
    return {b.points[lo], b.points[hi]};
}

StructureGraph build_graph(const ClusterSet& cs, double d_min)
{
    if (cs.boundaries.size() != cs.clusters.size())
        throw Error(Errc::InvalidArgument, "cluster set lacks boundaries");
    if (!(d_min >= 0.0))
        throw Error(Errc::InvalidArgument, "d_min must be non-negative");

    StructureGraph g;
    auto add_vertex = [&](const Point2& pos, VertexKind kind, int cluster, int cluster_b = -1) {
        StructureGraph::Vertex v;
        v.id = static_cast<int>(g.vertices.size());
        v.pos = pos;
        v.kind = kind;
        v.cluster = cluster;
        v.cluster_b = cluster_b;
        g.vertices.push_back(v);
        return v.id;
    };
    auto add_edge = [&](int a, int b) {
        if (a == b)
            return;
        const double w = (g.vertices[static_cast<std::size_t>(a)].pos -
                          g.vertices[static_cast<std::size_t>(b)].pos)
                             .norm();
        g.edges.push_back({a, b, w});
    };

    for (const auto& c : cs.clusters)
        add_vertex(c.mean, VertexKind::Center, c.id);

    // Border midpoints in (min, max) cluster-pair order.
    std::vector<const Border*> borders;
    for (const auto& b : cs.borders)
        borders.push_back(&b);
    std::sort(borders.begin(), borders.end(), [](const Border* x, const Border* y) {
        return std::pair(std::min(x->cluster_a, x->cluster_b), std::max(x->cluster_a, x->cluster_b)) <
               std::pair(std::min(y->cluster_a, y->cluster_b), std::max(y->cluster_a, y->cluster_b));
    });
    for (const Border* b : borders) {
        const int a = std::min(b->cluster_a, b->cluster_b);
        const int c = std::max(b->cluster_a, b->cluster_b);
        const int mid = add_vertex(b->midpoint, VertexKind::BorderMid, a, c);
        add_edge(a, mid);
        add_edge(mid, c);
    }

    const double d2 = d_min * d_min;
    for (const auto& c : cs.clusters) {
        const auto& boundary = cs.boundaries[static_cast<std::size_t>(c.id)];
        if (c.points.size() < 2 || boundary.empty())
            continue;
        PrincipalLine line;
        try {
            line = fit_principal_line(c.points);
        } catch (const Error&) {
            continue;
        }
        const auto [p0, p1] = line_boundary_intersections(line, boundary);
        for (const Point2& end : {p0, p1}) {
            const bool far = std::all_of(g.vertices.begin(), g.vertices.end(), [&](const auto& v) {
                return (v.pos - end).squaredNorm() > d2;
            });
            if (!far)
                continue;
            const int id = add_vertex(end, VertexKind::BarEnd, c.id);
            add_edge(id, c.id);
        }
    }

    g.component_count = count_components(g.vertices.size(), g.edges);
    if (g.component_count > 1)
        g.warnings.push_back("graph has " + std::to_string(g.component_count) + " connected components");
    return g;
}

} // namespace bridgenav
