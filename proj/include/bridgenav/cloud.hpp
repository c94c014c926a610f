#pragma once

#include "bridgenav/geometry.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string_view>

namespace bridgenav {

enum class Frame { Camera, RobotBase, Projected2D };

std::string_view to_string(Frame f);

struct PointCloud {
    Points3 points;
    Frame frame = Frame::Camera;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
};

enum class CloudFormat { Csv, PcdAscii, PlyAscii };

/// Picks the format from the file extension (.csv, .pcd, .ply).
CloudFormat format_from_extension(const std::filesystem::path& path);

PointCloud load_cloud(const std::filesystem::path& path, CloudFormat format);

/// Full-precision "x,y,z" lines after a "# x,y,z" header.
void write_cloud_csv(const PointCloud& cloud, std::ostream& out);
void save_cloud_csv(const PointCloud& cloud, const std::filesystem::path& path);

enum class Axis { X = 0, Y = 1, Z = 2 };

PointCloud passthrough_filter(const PointCloud& cloud, Axis axis, double lo, double hi);

/// One output point per occupied voxel of side `leaf`, located at the voxel
/// centroid. Output follows the order in which voxels are first touched.
PointCloud voxel_downsample(const PointCloud& cloud, double leaf);

/// A plane n.p = offset fitted by RANSAC together with its inliers.
struct PlanePatch {
    PointCloud inliers;
    Point3 normal = Point3::UnitZ();
    double offset = 0.0;
    Point3 centroid = Point3::Zero();
};

struct RansacParams {
    double dist_thresh = 0.01;
    int max_iters = 500;
    std::uint64_t seed = 0;
    double min_inlier_fraction = 0.2;
};

PlanePatch extract_plane_ransac(const PointCloud& cloud, const RansacParams& params);

class RigidTransform {
public:
    RigidTransform() = default;

    /// Throws InvalidTransform unless R is orthonormal with det +1 (to 1e-9).
    RigidTransform(const Eigen::Matrix3d& rotation, const Point3& translation);

    static RigidTransform identity() { return {}; }
    static RigidTransform translation(const Point3& t);
    static RigidTransform rotation_z(double angle);

    const Eigen::Matrix3d& rotation() const { return rotation_; }
    const Point3& translation() const { return translation_; }

private:
    Eigen::Matrix3d rotation_ = Eigen::Matrix3d::Identity();
    Point3 translation_ = Point3::Zero();
};

Point3 transform_point(const Point3& p, const RigidTransform& T);

/// Maps a camera-frame cloud into the robot base frame.
PointCloud transform_cloud(const PointCloud& cloud, const RigidTransform& T, Frame target);

/// Drops z; requires a RobotBase (or already projected) cloud.
PointCloud project_to_2d(const PointCloud& cloud);

Points2 xy_points(const PointCloud& cloud);

} // namespace bridgenav
