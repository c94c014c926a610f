#pragma once

#include "bridgenav/boundary.hpp"
#include "bridgenav/cloud.hpp"

#include <array>
#include <optional>
#include <string_view>
#include <vector>

namespace bridgenav {

/// Robot foot rectangle and the area-check tuning (n anchors, m neighbours, tolerance t).
struct FootParams {
    double width = 0.2;
    double length = 0.3;
    double t = 0.02;
    std::size_t n = 5;
    std::size_t m = 3;

    void validate() const;
};

struct SurfacePose {
    Point3 e_x = Point3::UnitX();
    Point3 e_y = Point3::UnitY();
    Point3 e_z = Point3::UnitZ();
    Point3 position = Point3::Zero();
};

/// One candidate foot rectangle: 4 corners followed by the 4 edge midpoints.
struct FootCandidate {
    Point3 anchor = Point3::Zero();
    std::array<Point3, 8> test_points{};
    std::array<bool, 8> passed{};
    bool accepted = false;
};

struct AreaCheckResult {
    std::vector<FootCandidate> candidates;
    std::optional<SurfacePose> pose;
};

/// S_pa: a plane is available iff the extracted planar cloud is non-empty.
bool plane_available(const PointCloud& planar);

/// Tries the fp.n boundary points nearest the centroid as foot anchors and
/// returns every rectangle examined; the first one whose 8 test points all
/// pass fixes the pose.
AreaCheckResult area_check_detailed(const Boundary3& b, const Point3& centroid, const Point3& normal,
                                    const FootParams& fp);

std::optional<SurfacePose> area_check_and_pose(const Boundary3& b, const Point3& centroid,
                                               const Point3& normal, const FootParams& fp);

bool height_available(const Point3& surface_centroid_cam, const RigidTransform& cam_to_base,
                      double base_height, double tol);

enum class Mode { Mobile, Inchworm, Stop };

std::string_view to_string(Mode m);

struct SwitchDecision {
    bool s_pa = false;
    bool s_am = false;
    bool s_hc = false;
    Mode mode = Mode::Stop;
    std::optional<SurfacePose> pose;
};

SwitchDecision switch_decision(bool s_pa, bool s_am, bool s_hc, std::optional<SurfacePose> pose);

} // namespace bridgenav
