#include "bridgenav/switching.hpp"

#include "bridgenav/error.hpp"

#include <Eigen/Geometry>

#include <cmath>

namespace bridgenav {

void FootParams::validate() const
{
    if (!(width > 0.0) || !(length > 0.0) || !(t >= 0.0) || n < 1 || m < 1)
        throw Error(Errc::InvalidArgument, "foot parameters need w, l > 0, t >= 0, n, m >= 1");
}

bool plane_available(const PointCloud& planar)
{
    return !planar.empty();
}

namespace {

// A test point passes when, for each of its m nearest boundary samples q,
// it is closer to the centroid than q, or farther by a relative margin below t.
bool test_point_passes(const Boundary3& b, const Point3& centroid, const Point3& r, const FootParams& fp)
{
    const double d_r = (r - centroid).norm();
    if (d_r == 0.0)
        return true;
    for (auto i : k_nearest<3>(b.points, r, fp.m)) {
        const double d_q = (b.points[i] - centroid).norm();
        if (!(d_r < d_q || (d_r - d_q) / d_r < fp.t))
            return false;
    }
    return true;
}

} // namespace

AreaCheckResult area_check_detailed(const Boundary3& b, const Point3& centroid, const Point3& normal,
                                    const FootParams& fp)
{
    fp.validate();
    if (b.empty())
        throw Error(Errc::EmptyBoundary, "area check on an empty boundary");
    if (std::abs(normal.norm() - 1.0) > 1e-6)
        throw Error(Errc::InvalidArgument, "plane normal must be a unit vector");

    AreaCheckResult result;
    for (auto idx : k_nearest<3>(b.points, centroid, fp.n)) {
        const Point3& anchor = b.points[idx];
        Point3 ex = anchor - centroid;
        ex -= ex.dot(normal) * normal;
        const double len = ex.norm();
        if (!(len > 1e-12))
            throw Error(Errc::DegenerateFrame, "anchor coincides with the centroid");
        ex /= len;
        const Point3 ez = normal;
        const Point3 ey = ez.cross(ex);

        // Corners in cyclic order: two on the anchor side, two shifted l toward the centroid.
        const Point3 half_w = 0.5 * fp.width * ey;
        const Point3 back = -fp.length * ex;
        const std::array<Point3, 4> corners{anchor + half_w, anchor - half_w, anchor - half_w + back,
                                            anchor + half_w + back};
        FootCandidate cand;
        cand.anchor = anchor;
        for (std::size_t i = 0; i < 4; ++i) {
            cand.test_points[i] = corners[i];
            cand.test_points[i + 4] = 0.5 * (corners[i] + corners[(i + 1) % 4]);
        }
        cand.accepted = true;
        for (std::size_t i = 0; i < 8; ++i) {
            cand.passed[i] = test_point_passes(b, centroid, cand.test_points[i], fp);
            cand.accepted = cand.accepted && cand.passed[i];
        }
        result.candidates.push_back(cand);
        if (cand.accepted) {
            Point3 rc = Point3::Zero();
            for (const auto& p : cand.test_points)
                rc += p;
            rc /= 8.0;
            SurfacePose pose;
            pose.e_x = ex;
            pose.e_y = ey;
            pose.e_z = ez;
            // The -l/4 shift is applied along the rectangle's own e_y axis.
            pose.position = rc - 0.25 * fp.length * ey;
            result.pose = pose;
            break;
        }
    }
    return result;
}

std::optional<SurfacePose> area_check_and_pose(const Boundary3& b, const Point3& centroid,
                                               const Point3& normal, const FootParams& fp)
{
    return area_check_detailed(b, centroid, normal, fp).pose;
}

bool height_available(const Point3& surface_centroid_cam, const RigidTransform& cam_to_base,
                      double base_height, double tol)
{
    if (!(tol >= 0.0))
        throw Error(Errc::InvalidArgument, "height tolerance must be non-negative");
    const Point3 in_base = transform_point(surface_centroid_cam, cam_to_base);
    return std::abs(in_base.z() - base_height) <= tol;
}

std::string_view to_string(Mode m)
{
    switch (m) {
    case Mode::Mobile: return "mobile";
    case Mode::Inchworm: return "inchworm";
    case Mode::Stop: return "stop";
    }
    return "stop";
}

SwitchDecision switch_decision(bool s_pa, bool s_am, bool s_hc, std::optional<SurfacePose> pose)
{
    if (pose.has_value() != s_am)
        throw Error(Errc::InconsistentInput, "pose must be present exactly when S_am holds");
    SwitchDecision d;
    d.s_pa = s_pa;
    d.s_am = s_am;
    d.s_hc = s_hc;
    d.pose = std::move(pose);
    if (s_pa && s_am)
        d.mode = s_hc ? Mode::Mobile : Mode::Inchworm;
    else
        d.mode = Mode::Stop;
    return d;
}

} // namespace bridgenav
