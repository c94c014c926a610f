#include "bridgenav/error.hpp"
#include "bridgenav/switching.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace bridgenav;

namespace {

Points3 filled_rect(double sx, double sy, std::size_t n, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    Points3 pts;
    for (std::size_t i = 0; i < n; ++i)
        pts.emplace_back(u(rng) * sx, u(rng) * sy, 0.0);
    return pts;
}

double orthonormality_residual(const SurfacePose& p)
{
    Eigen::Matrix3d R;
    R.col(0) = p.e_x;
    R.col(1) = p.e_y;
    R.col(2) = p.e_z;
    return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
}

FootParams foot()
{
    FootParams f;
    f.width = 0.2;
    f.length = 0.3;
    f.n = 5;
    f.m = 3;
    f.t = 0.02;
    return f;
}

} // namespace

TEST_SUITE("switching")
{
    TEST_CASE("plane availability")
    {
        CHECK_FALSE(plane_available(PointCloud{}));
        PointCloud c;
        c.points = {{0, 0, 0}};
        CHECK(plane_available(c));
    }

    TEST_CASE("a 1 m square fits the foot")
    {
        const Points3 pts = filled_rect(1.0, 1.0, 20000, 1);
        const Boundary3 b = ncbe(pts, 0.02);
        const auto pose = area_check_and_pose(b, b.center, Point3::UnitZ(), foot());
        REQUIRE(pose.has_value());
        CHECK(orthonormality_residual(*pose) <= 1e-6);
        CHECK(pose->e_z == Point3::UnitZ());
    }

    TEST_CASE("a 5 cm square cannot hold the foot")
    {
        const Points3 pts = filled_rect(0.05, 0.05, 2000, 2);
        const Boundary3 b = ncbe(pts, 0.005);
        const AreaCheckResult r = area_check_detailed(b, b.center, Point3::UnitZ(), foot());
        CHECK_FALSE(r.pose.has_value());
        CHECK(r.candidates.size() == 5);
        for (const auto& c : r.candidates)
            CHECK_FALSE(c.accepted);
    }

    TEST_CASE("anchor on the x axis gives the axis-aligned frame")
    {
        Boundary3 b;
        for (int k = 0; k < 360; ++k) {
            const double a = 2.0 * std::numbers::pi * k / 360.0;
            b.points.emplace_back(std::cos(a), std::sin(a), 0.0);
        }
        // Pulled inward so it is the unique nearest anchor.
        b.points[0] = Point3(0.99, 0.0, 0.0);
        const AreaCheckResult r = area_check_detailed(b, Point3::Zero(), Point3::UnitZ(), foot());
        REQUIRE(!r.candidates.empty());
        const auto& first = r.candidates.front();
        CHECK((first.anchor - Point3(0.99, 0, 0)).norm() < 1e-12);
        // The first candidate's corners lie across e_y = (0, 1, 0) from the anchor.
        CHECK((first.test_points[0] - Point3(0.99, 0.1, 0.0)).norm() < 1e-12);
        REQUIRE(r.pose.has_value());
        CHECK((r.pose->e_x - Point3(1, 0, 0)).norm() < 1e-12);
        CHECK((r.pose->e_y - Point3(0, 1, 0)).norm() < 1e-12);
    }

    TEST_CASE("anchor at the centroid is a degenerate frame")
    {
        Boundary3 b;
        b.points = {Point3::Zero(), Point3(1, 0, 0)};
        try {
            area_check_detailed(b, Point3::Zero(), Point3::UnitZ(), foot());
            FAIL("expected DegenerateFrame");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::DegenerateFrame);
        }
    }

    TEST_CASE("candidate rectangles keep the foot dimensions")
    {
        const Points3 pts = filled_rect(0.8, 0.6, 10000, 3);
        const Boundary3 b = ncbe(pts, 0.02);
        const AreaCheckResult r = area_check_detailed(b, b.center, Point3::UnitZ(), foot());
        for (const auto& c : r.candidates) {
            const auto& t = c.test_points;
            CHECK((t[0] - t[1]).norm() == doctest::Approx(0.2));
            CHECK((t[1] - t[2]).norm() == doctest::Approx(0.3));
            CHECK((t[4] - 0.5 * (t[0] + t[1])).norm() < 1e-12);
        }
    }

    TEST_CASE("height check")
    {
        CHECK(height_available({0, 0, 0}, RigidTransform::identity(), 0.0, 0.01));
        CHECK_FALSE(height_available({0, 0, 0}, RigidTransform::translation({0, 0, -0.07}), 0.0, 0.01));
        CHECK(height_available({0, 0, 0.25}, RigidTransform::identity(), 0.25, 0.0));
        CHECK(height_available({0, 0, 0.5}, RigidTransform::identity(), 0.0, 0.5));
    }

    TEST_CASE("switching function table")
    {
        SurfacePose pose;
        CHECK(switch_decision(true, true, true, pose).mode == Mode::Mobile);
        CHECK(switch_decision(true, true, false, pose).mode == Mode::Inchworm);
        CHECK(switch_decision(true, false, true, std::nullopt).mode == Mode::Stop);
        CHECK(switch_decision(true, false, false, std::nullopt).mode == Mode::Stop);
        CHECK(switch_decision(false, false, false, std::nullopt).mode == Mode::Stop);
        CHECK_THROWS_AS(switch_decision(true, true, true, std::nullopt), Error);
        CHECK_THROWS_AS(switch_decision(true, false, true, pose), Error);
    }
}
