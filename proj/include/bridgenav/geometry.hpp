#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace bridgenav {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;

template <int Dim>
using PointN = Eigen::Matrix<double, Dim, 1>;

template <int Dim>
using PointList = std::vector<PointN<Dim>>;

using Points2 = PointList<2>;
using Points3 = PointList<3>;

template <int Dim>
PointN<Dim> mean_of(std::span<const PointN<Dim>> pts);

/// Indices (i, j), i < j, of the two points at maximum mutual distance.
/// The first maximal pair in index order wins. Requires pts.size() >= 1;
/// a singleton returns (0, 0).
std::pair<std::size_t, std::size_t> farthest_pair(std::span<const Point2> pts);
std::pair<std::size_t, std::size_t> farthest_pair(std::span<const Point3> pts);

/// Maximum pairwise distance (0 for fewer than two points).
double diameter(std::span<const Point2> pts);

/// Indices of the convex hull in counter-clockwise order (Andrew's monotone chain).
/// Collinear points on hull edges are dropped.
std::vector<std::size_t> convex_hull(std::span<const Point2> pts);

/// The k points of `pts` nearest to `q`, nearest first; ties by lower index.
template <int Dim>
std::vector<std::size_t> k_nearest(std::span<const PointN<Dim>> pts, const PointN<Dim>& q,
                                   std::size_t k);

/// Median over points of the distance to the nearest other point.
/// Returns 0 for fewer than two points.
double median_nn_spacing(std::span<const Point2> pts);

/// Euclidean distance from `p` to the segment [a, b].
double point_segment_distance(const Point2& p, const Point2& a, const Point2& b);

/// Wrap an angle into (-pi, pi].
double wrap_angle(double a);

} // namespace bridgenav
