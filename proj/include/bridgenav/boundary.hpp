#pragma once

#include "bridgenav/geometry.hpp"

#include <span>

namespace bridgenav {

/// Boundary samples of a point set together with the mean of that set.
template <int Dim>
struct BasicBoundary {
    PointList<Dim> points;
    PointN<Dim> center = PointN<Dim>::Zero();
    double alpha_s = 0.0;

    bool empty() const { return points.empty(); }
};

using Boundary = BasicBoundary<2>;
using Boundary3 = BasicBoundary<3>;

/// Slicing boundary estimator. Each coordinate axis is cut into windows of
/// width alpha_s centred at min + i * alpha_s; the farthest pair of each
/// window is kept. Output points are members of the input, deduplicated by
/// exact coordinates, in order of discovery.
Boundary ncbe(std::span<const Point2> points, double alpha_s);
Boundary3 ncbe(std::span<const Point3> points, double alpha_s);

/// Default slicing width: five times the median nearest-neighbour spacing.
double default_alpha(std::span<const Point2> points);

enum class InsideRule {
    All, ///< closer to the center than every one of the m nearest boundary points
    Any, ///< closer than at least one of them
};

/// Center-closest-points test.
bool point_in_boundary(const Boundary& b, const Point2& p, std::size_t m,
                       InsideRule rule = InsideRule::All);

struct Border {
    int cluster_a = -1;
    int cluster_b = -1;
    Points2 points;
    double length = 0.0;
    Point2 midpoint = Point2::Zero();

    bool empty() const { return points.empty(); }
};

/// Boundary points of either boundary lying within eps_border of the other.
/// length is the diameter of that set; midpoint its mean (zero when empty).
Border cluster_border(const Boundary& a, const Boundary& b, double eps_border);

/// Two clusters are neighbours when their border is at least l_b long.
bool are_neighbors(const Border& border, double l_b);

} // namespace bridgenav
