#include "bridgenav/error.hpp"
#include "bridgenav/graph.hpp"
#include "bridgenav/synth.hpp"

#include "oracles.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bridgenav;

namespace {

// Ground-truth clusters of a synthetic shape with borders and neighbours filled in.
ClusterSet truth_clusters(const StructureSpec& spec)
{
    auto [cloud, gt] = generate(spec);
    const Points2 pts = xy_points(cloud);
    const double alpha = default_alpha(pts);
    ClusterSet cs = testutil::from_labels(pts, gt.labels, alpha);
    neighbor_stats(cs, std::max(0.03, 4.0 * alpha), 2.0 * alpha);
    return cs;
}

std::size_t count_kind(const StructureGraph& g, VertexKind k)
{
    return static_cast<std::size_t>(
        std::count_if(g.vertices.begin(), g.vertices.end(), [&](const auto& v) { return v.kind == k; }));
}

void check_invariants(const ClusterSet& cs, const StructureGraph& g)
{
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        CHECK(g.vertices[i].id == static_cast<int>(i));
    // Centers first, in cluster order, then border midpoints, then bar ends.
    for (std::size_t i = 0; i < cs.size(); ++i) {
        CHECK(g.vertices[i].kind == VertexKind::Center);
        CHECK(g.vertices[i].cluster == static_cast<int>(i));
    }
    for (std::size_t i = 1; i < g.vertices.size(); ++i)
        CHECK(static_cast<int>(g.vertices[i - 1].kind) <= static_cast<int>(g.vertices[i].kind));

    std::size_t pairs = 0;
    for (std::size_t a = 0; a < cs.size(); ++a)
        for (std::size_t b = a + 1; b < cs.size(); ++b)
            pairs += cs.neighbors[a][b];
    CHECK(count_kind(g, VertexKind::Center) == cs.size());
    CHECK(count_kind(g, VertexKind::BorderMid) == pairs);

    const std::vector<int> deg = oracle::degrees(g.weighted());
    for (const auto& v : g.vertices) {
        if (v.kind == VertexKind::BorderMid)
            CHECK(deg[static_cast<std::size_t>(v.id)] == 2);
        if (v.kind == VertexKind::BarEnd)
            CHECK(deg[static_cast<std::size_t>(v.id)] == 1);
    }
    for (const auto& e : g.edges) {
        const double d = (g.vertices[static_cast<std::size_t>(e.u)].pos - g.vertices[static_cast<std::size_t>(e.v)].pos).norm();
        CHECK(std::abs(e.w - d) < 1e-12);
        CHECK(e.u != e.v);
    }
    CHECK(g.component_count == count_components(g.vertices.size(), g.edges));
}

} // namespace

TEST_SUITE("graph")
{
    TEST_CASE("principal line of points on y = 2x")
    {
        Points2 pts;
        for (int i = -5; i <= 5; ++i)
            pts.emplace_back(0.1 * i, 0.2 * i);
        const PrincipalLine line = fit_principal_line(pts);
        CHECK((line.direction - Point2(1, 2).normalized()).norm() < 1e-9);
        CHECK(line.point.norm() < 1e-12);
        CHECK(line.lambda_minor < 1e-12);
    }

    TEST_CASE("isotropic cloud still gives a unit direction with a small eigen gap")
    {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> n(0.0, 1.0);
        Points2 pts;
        for (int i = 0; i < 20000; ++i)
            pts.emplace_back(n(rng), n(rng));
        const PrincipalLine line = fit_principal_line(pts);
        CHECK(std::abs(line.direction.norm() - 1.0) < 1e-12);
        CHECK(line.direction.x() >= 0.0);
        CHECK((line.lambda_major - line.lambda_minor) / line.lambda_major < 0.1);
    }

    TEST_CASE("two points define their own line")
    {
        const Points2 pts = {{1, 1}, {0, 3}};
        const PrincipalLine line = fit_principal_line(pts);
        CHECK((line.direction - Point2(1, -2).normalized()).norm() < 1e-9);
        CHECK_THROWS_AS(fit_principal_line(Points2{{0, 0}}), Error);
        CHECK_THROWS_AS(fit_principal_line(Points2{{2, 2}, {2, 2}}), Error);
    }

    TEST_CASE("line meets a bar boundary at its ends")
    {
        Boundary b;
        for (int i = 0; i <= 100; ++i) {
            b.points.emplace_back(0.01 * i, 0.0);
            b.points.emplace_back(0.01 * i, 0.1);
        }
        for (int i = 1; i < 10; ++i) {
            b.points.emplace_back(0.0, 0.01 * i);
            b.points.emplace_back(1.0, 0.01 * i);
        }
        PrincipalLine line;
        line.point = {0.5, 0.05};
        line.direction = {1, 0};
        const auto [lo, hi] = line_boundary_intersections(line, b);
        CHECK(lo.x() == doctest::Approx(0.0));
        CHECK(hi.x() == doctest::Approx(1.0));
        CHECK_THROWS_AS(line_boundary_intersections(line, Boundary{}), Error);
    }

    TEST_CASE("L ground truth gives a seven vertex path")
    {
        StructureSpec s;
        s.shape = Shape::L;
        s.seed = 3;
        const ClusterSet cs = truth_clusters(s);
        const StructureGraph g = build_graph(cs, 0.1);
        CHECK(g.vertices.size() == 7);
        CHECK(g.edges.size() == 6);
        CHECK(g.component_count == 1);
        CHECK(g.warnings.empty());
        CHECK(count_kind(g, VertexKind::BarEnd) == 2);
        const std::vector<int> deg = oracle::degrees(g.weighted());
        CHECK(std::count(deg.begin(), deg.end(), 1) == 2);
        CHECK(std::count(deg.begin(), deg.end(), 2) == 5);
        check_invariants(cs, g);
    }

    TEST_CASE("every shape satisfies the graph invariants")
    {
        for (Shape shape : {Shape::Cross, Shape::K, Shape::L, Shape::T, Shape::I}) {
            CAPTURE(to_string(shape));
            StructureSpec s;
            s.shape = shape;
            s.density = 10000;
            s.seed = 5;
            const ClusterSet cs = truth_clusters(s);
            const StructureGraph g = build_graph(cs, 0.1);
            check_invariants(cs, g);
            CHECK(g.component_count == 1);
        }
    }

    TEST_CASE("a single compact cluster with a large d_min is one vertex")
    {
        std::mt19937_64 rng(2);
        std::uniform_real_distribution<double> u(0.0, 0.2);
        Points2 pts;
        for (int i = 0; i < 2000; ++i)
            pts.emplace_back(u(rng), u(rng));
        ClusterSet cs = testutil::from_labels(pts, std::vector<int>(pts.size(), 0), 0.02);
        neighbor_stats(cs, 0.05, 0.04);
        const StructureGraph g = build_graph(cs, 1.0);
        CHECK(g.vertices.size() == 1);
        CHECK(g.edges.empty());
        CHECK(g.component_count == 1);
    }

    TEST_CASE("short bars leave no bar ends")
    {
        StructureSpec s;
        s.shape = Shape::Cross;
        s.bar_length = 0.1;
        s.bar_width = 0.15;
        s.seed = 6;
        const ClusterSet cs = truth_clusters(s);
        const StructureGraph g = build_graph(cs, 0.2);
        CHECK(count_kind(g, VertexKind::BarEnd) == 0);
        check_invariants(cs, g);
    }

    TEST_CASE("clusters without borders leave separate components")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(0.0, 0.2);
        Points2 pts;
        std::vector<int> labels;
        for (int i = 0; i < 4000; ++i) {
            const int c = i % 2;
            pts.emplace_back(u(rng) + 2.0 * c, u(rng));
            labels.push_back(c);
        }
        ClusterSet cs = testutil::from_labels(pts, labels, 0.02);
        neighbor_stats(cs, 0.05, 0.04);
        const StructureGraph g = build_graph(cs, 1.0);
        CHECK(g.component_count == 2);
        CHECK(g.warnings.size() == 1);
    }

    TEST_CASE("missing boundaries and negative d_min are rejected")
    {
        ClusterSet cs;
        cs.clusters.resize(1);
        CHECK_THROWS_AS(build_graph(cs, 0.1), Error);
        cs.boundaries.resize(1);
        CHECK_THROWS_AS(build_graph(cs, -1.0), Error);
    }

    TEST_CASE("component count")
    {
        CHECK(count_components(3, {}) == 3);
        CHECK(count_components(3, {{0, 1, 1.0}, {1, 2, 1.0}}) == 1);
        CHECK(count_components(0, {}) == 0);
    }
}
