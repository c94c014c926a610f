#include "bridgenav/boundary.hpp"
#include "bridgenav/error.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bridgenav;

namespace {

Points2 uniform_square(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    Points2 pts;
    for (std::size_t i = 0; i < n; ++i)
        pts.emplace_back(u(rng), u(rng));
    return pts;
}

double perimeter_distance(const Point2& p)
{
    const std::vector<Point2> sq = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return oracle::polygon_edge_distance(sq, p);
}

// Samples along the sides of the axis-aligned square [x0, x0+1] x [y0, y0+1].
Boundary square_outline(double x0, double y0, double pitch)
{
    Boundary b;
    const int n = static_cast<int>(std::lround(1.0 / pitch));
    for (int i = 0; i < n; ++i) {
        const double t = i * pitch;
        b.points.emplace_back(x0 + t, y0);
        b.points.emplace_back(x0 + 1.0, y0 + t);
        b.points.emplace_back(x0 + 1.0 - t, y0 + 1.0);
        b.points.emplace_back(x0, y0 + 1.0 - t);
    }
    b.center = Point2(x0 + 0.5, y0 + 0.5);
    b.alpha_s = pitch;
    return b;
}

} // namespace

TEST_SUITE("boundary")
{
    TEST_CASE("two points are both on the boundary")
    {
        const Points2 pts = {{0, 0}, {1, 1}};
        const Boundary b = ncbe(pts, 0.5);
        CHECK(b.points.size() == 2);
        CHECK((b.center - Point2(0.5, 0.5)).norm() < 1e-12);
    }

    TEST_CASE("boundary errors")
    {
        const Points2 none;
        CHECK_THROWS_AS(ncbe(none, 0.1), Error);
        const Points2 pts = {{0, 0}, {1, 1}};
        CHECK_THROWS_AS(ncbe(pts, 0.0), Error);
        CHECK_THROWS_AS(ncbe(pts, -1.0), Error);
    }

    TEST_CASE("unit square boundary hugs the perimeter")
    {
        const Points2 pts = uniform_square(10000, 1);
        const Boundary b = ncbe(pts, 0.05);
        REQUIRE(!b.empty());
        for (const auto& p : b.points)
            CHECK(perimeter_distance(p) <= 0.05);
    }

    TEST_CASE("boundary points are members of the input and the center is its mean")
    {
        const Points2 pts = uniform_square(2000, 2);
        const Boundary b = ncbe(pts, 0.05);
        for (const auto& p : b.points)
            CHECK(std::find(pts.begin(), pts.end(), p) != pts.end());
        Point2 mean = Point2::Zero();
        for (const auto& p : pts)
            mean += p;
        CHECK((mean / static_cast<double>(pts.size()) - b.center).norm() < 1e-9);
    }

    TEST_CASE("a small hole does not show up in the boundary")
    {
        Points2 pts;
        for (const auto& p : uniform_square(12000, 3))
            if (std::abs(p.x() - 0.5) > 0.1 || std::abs(p.y() - 0.5) > 0.1)
                pts.push_back(p);
        const Boundary b = ncbe(pts, 0.05);
        for (const auto& p : b.points)
            CHECK(perimeter_distance(p) <= 0.05);
    }

    TEST_CASE("three-dimensional boundary of a flat patch")
    {
        std::mt19937_64 rng(4);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        Points3 pts;
        for (int i = 0; i < 3000; ++i)
            pts.emplace_back(u(rng), u(rng), 0.2);
        const Boundary3 b = ncbe(pts, 0.05);
        for (const auto& p : b.points)
            CHECK(perimeter_distance(Point2(p.x(), p.y())) <= 0.05);
    }

    TEST_CASE("default alpha is five nearest-neighbour spacings")
    {
        Points2 grid;
        for (int i = 0; i < 20; ++i)
            for (int j = 0; j < 20; ++j)
                grid.emplace_back(0.01 * i, 0.01 * j);
        CHECK(default_alpha(grid) == doctest::Approx(0.05).epsilon(1e-9));
    }

    TEST_CASE("center and far point against the unit square")
    {
        const Boundary b = ncbe(uniform_square(5000, 5), 0.05);
        for (auto rule : {InsideRule::All, InsideRule::Any}) {
            CHECK(point_in_boundary(b, {0.5, 0.5}, 5, rule));
            CHECK_FALSE(point_in_boundary(b, {1.5, 0.5}, 5, rule));
        }
        CHECK_THROWS_AS(point_in_boundary(Boundary{}, {0, 0}, 5), Error);
    }

    TEST_CASE("inside test agrees with ray casting on a convex 12-gon")
    {
        std::vector<Point2> poly;
        for (int k = 0; k < 12; ++k) {
            const double a = 2.0 * std::numbers::pi * k / 12.0;
            poly.emplace_back(0.5 + 0.5 * std::cos(a), 0.5 + 0.5 * std::sin(a));
        }
        Points2 fill;
        for (const auto& p : uniform_square(20000, 6))
            if (oracle::point_in_polygon(poly, p))
                fill.push_back(p);
        const Boundary b = ncbe(fill, 0.05);
        const Points2 queries = uniform_square(500, 7, -0.2, 1.2);
        int considered = 0, agree = 0;
        for (const auto& q : queries) {
            if (oracle::polygon_edge_distance(poly, q) < 0.02)
                continue;
            ++considered;
            agree += point_in_boundary(b, q, 5) == oracle::point_in_polygon(poly, q);
        }
        REQUIRE(considered > 400);
        CHECK(static_cast<double>(agree) / considered >= 0.98);
    }

    TEST_CASE("squares sharing an edge have a unit border")
    {
        const Boundary a = square_outline(0.0, 0.0, 0.05), b = square_outline(1.0, 0.0, 0.05);
        const Border border = cluster_border(a, b, 0.02);
        CHECK(border.length == doctest::Approx(1.0).epsilon(0.1));
        CHECK((border.midpoint - Point2(1.0, 0.5)).norm() < 0.05);
        CHECK(are_neighbors(border, 0.3));
    }

    TEST_CASE("distant squares have no border")
    {
        const Border border = cluster_border(square_outline(0.0, 0.0, 0.05), square_outline(2.0, 0.0, 0.05), 0.02);
        CHECK(border.empty());
        CHECK(border.length == 0.0);
        CHECK_FALSE(are_neighbors(border, 0.01));
    }

    TEST_CASE("corner contact is too short to make neighbours")
    {
        const double eps = 0.02;
        const Border border = cluster_border(square_outline(0.0, 0.0, 0.05), square_outline(1.0, 1.0, 0.05), eps);
        CHECK(border.length <= 2.0 * eps);
        CHECK_FALSE(are_neighbors(border, 0.1));
    }

    TEST_CASE("neighbour rule")
    {
        Border b;
        b.length = 1.0;
        b.points = {{0, 0}};
        CHECK(are_neighbors(b, 0.3));
        CHECK_FALSE(are_neighbors(Border{}, 1e-9));
        CHECK_FALSE(are_neighbors(Border{}, 0.3));
        CHECK_THROWS_AS(are_neighbors(b, 0.0), Error);
    }
}
