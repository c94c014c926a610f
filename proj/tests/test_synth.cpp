#include "bridgenav/error.hpp"
#include "bridgenav/graph.hpp"
#include "bridgenav/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace bridgenav;

namespace {

double union_area(const GroundTruth& gt)
{
    // Pieces overlap only where a later piece covers an earlier one; sample on a fine grid.
    double lo_x = 1e9, hi_x = -1e9, lo_y = 1e9, hi_y = -1e9;
    for (const auto& p : gt.pieces)
        for (const auto& c : p.rect.corners()) {
            lo_x = std::min(lo_x, c.x());
            hi_x = std::max(hi_x, c.x());
            lo_y = std::min(lo_y, c.y());
            hi_y = std::max(hi_y, c.y());
        }
    const double h = 0.002;
    std::size_t hits = 0;
    for (double x = lo_x + h / 2; x < hi_x; x += h)
        for (double y = lo_y + h / 2; y < hi_y; y += h)
            hits += std::any_of(gt.pieces.begin(), gt.pieces.end(), [&](const TruePiece& p) { return p.rect.contains({x, y}); });
    return static_cast<double>(hits) * h * h;
}

} // namespace

TEST_SUITE("synth")
{
    TEST_CASE("shape names")
    {
        CHECK(parse_shape("Cross") == Shape::Cross);
        CHECK(parse_shape("i") == Shape::I);
        CHECK_FALSE(parse_shape("z").has_value());
        for (Shape s : {Shape::Cross, Shape::K, Shape::L, Shape::T, Shape::I})
            CHECK(parse_shape(to_string(s)) == s);
    }

    TEST_CASE("cross point count follows density and area")
    {
        StructureSpec s;
        s.shape = Shape::Cross;
        s.noise_sigma = 0.0;
        s.density = 20000;
        s.seed = 1;
        auto [cloud, gt] = generate(s);
        // Four 1.0 x 0.15 bars plus the 0.15 x 0.15 center.
        const double expected = s.density * (4 * 1.0 * 0.15 + 0.15 * 0.15);
        CHECK(std::abs(static_cast<double>(cloud.size()) - expected) <= 0.01 * expected);
        CHECK(union_area(gt) == doctest::Approx(4 * 0.15 + 0.0225).epsilon(0.01));
        CHECK(cloud.frame == Frame::Camera);
        CHECK(gt.labels.size() == cloud.size());
    }

    TEST_CASE("noise-free points lie in their labelled piece")
    {
        for (Shape shape : {Shape::Cross, Shape::K, Shape::L, Shape::T, Shape::I}) {
            StructureSpec s;
            s.shape = shape;
            s.noise_sigma = 0.0;
            s.density = 5000;
            s.seed = 2;
            auto [cloud, gt] = generate(s);
            std::size_t bad = 0;
            for (std::size_t i = 0; i < cloud.size(); ++i) {
                const Point3& p = cloud.points[i];
                bad += !gt.pieces[static_cast<std::size_t>(gt.labels[i])].rect.contains({p.x(), p.y()});
                CHECK(p.z() == 0.0);
            }
            CHECK(bad == 0);
        }
    }

    TEST_CASE("same seed gives the same cloud")
    {
        StructureSpec s;
        s.shape = Shape::K;
        s.seed = 3;
        CHECK(generate(s).first.points == generate(s).first.points);
        StructureSpec other = s;
        other.seed = 4;
        CHECK(generate(s).first.points != generate(other).first.points);
    }

    TEST_CASE("degrade with no loss is the identity and full dropout empties")
    {
        StructureSpec s;
        s.seed = 5;
        const PointCloud c = generate(s).first;
        CHECK(degrade(c, 0.0, 0.0, 1).points == c.points);
        CHECK(degrade(c, 1.0, 0.0, 1).empty());
        CHECK_THROWS_AS(degrade(c, 1.5, 0.0, 1), Error);
        CHECK_THROWS_AS(degrade(c, 0.0, -1.0, 1), Error);
    }

    TEST_CASE("range falloff thins far points at the expected rate")
    {
        // A 2 m bar along x; keep probability 1 - 0.25 x at range x.
        PointCloud c;
        for (int i = 0; i < 20000; ++i)
            c.points.emplace_back(2.0 * (i + 0.5) / 20000.0, 0.0, 0.0);
        int within = 0;
        const int seeds = 40;
        for (int seed = 0; seed < seeds; ++seed) {
            const PointCloud d = degrade(c, 0.0, 0.25, static_cast<std::uint64_t>(seed));
            // Far half (x in [1, 2]): p_keep averages 0.625 over 10000 points.
            std::size_t far = 0;
            for (const auto& p : d.points)
                far += p.x() >= 1.0;
            const double mean = 6250.0;
            double var = 0.0;
            for (int i = 10000; i < 20000; ++i) {
                const double q = 1.0 - 0.25 * c.points[static_cast<std::size_t>(i)].x();
                var += q * (1.0 - q);
            }
            within += std::abs(static_cast<double>(far) - mean) <= 2.576 * std::sqrt(var);
        }
        CHECK(within >= static_cast<int>(0.95 * seeds));
    }

    TEST_CASE("ground truth graphs are connected")
    {
        for (Shape shape : {Shape::Cross, Shape::K, Shape::L, Shape::T, Shape::I}) {
            CAPTURE(to_string(shape));
            StructureSpec s;
            s.shape = shape;
            const GroundTruth gt = generate(s).second;
            std::vector<WeightedGraph::Edge> edges;
            for (auto [a, b] : gt.graph_edges)
                edges.push_back({a, b, 1.0});
            CHECK(count_components(gt.graph_vertices.size(), edges) == 1);
        }
    }

    TEST_CASE("invalid specs are rejected")
    {
        StructureSpec s;
        s.bar_width = 0.0;
        CHECK_THROWS_AS(generate(s), Error);
        s = {};
        s.density = -1.0;
        CHECK_THROWS_AS(generate(s), Error);
        s = {};
        s.noise_sigma = -0.1;
        CHECK_THROWS_AS(generate(s), Error);
        PlaneSpec p;
        p.size_x = 0.0;
        CHECK_THROWS_AS(generate_plane(p), Error);
    }

    TEST_CASE("plane patch sits at its height")
    {
        PlaneSpec p;
        p.noise_sigma = 0.0;
        p.height = 0.3;
        const PointCloud c = generate_plane(p);
        CHECK(c.size() == static_cast<std::size_t>(std::llround(p.density * 0.36)));
        for (const auto& q : c.points) {
            CHECK(q.z() == 0.3);
            CHECK(std::abs(q.x()) <= 0.3);
        }
    }
}
