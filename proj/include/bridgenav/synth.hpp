#pragma once

#include "bridgenav/cloud.hpp"
#include "bridgenav/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

namespace bridgenav {

enum class Shape { Cross, K, L, T, I };

std::string_view to_string(Shape s);
/// Accepts "cross", "k", "l", "t", "i" in any case.
std::optional<Shape> parse_shape(std::string_view name);

struct StructureSpec {
    Shape shape = Shape::L;
    double bar_length = 1.0;
    double bar_width = 0.15;
    double density = 20000.0;
    double noise_sigma = 0.002;
    /// Side of the square junction area as a multiple of bar_width.
    double junction_scale = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

/// Oriented rectangle: center, unit axis, half extents along and across it.
struct Rect {
    Point2 center = Point2::Zero();
    Point2 axis = Point2::UnitX();
    double half_length = 0.0;
    double half_width = 0.0;

    bool contains(const Point2& p) const;
    double area() const { return 4.0 * half_length * half_width; }
    /// Counter-clockwise corners.
    std::vector<Point2> corners() const;
};

struct TruePiece {
    Rect rect;
    bool junction = false;
};

struct GroundTruth {
    /// Piece index per generated point (assigned before noise).
    std::vector<int> labels;
    std::vector<TruePiece> pieces;
    /// Piece centers, junction interface midpoints and free bar ends.
    Points2 graph_vertices;
    std::vector<std::pair<int, int>> graph_edges;
};

/// Camera-frame cloud on the z = 0 plane; x doubles as the range axis for degrade().
std::pair<PointCloud, GroundTruth> generate(const StructureSpec& spec);

/// Drops each point with probability clamp(dropout + falloff * max(0, x), 0, 1).
PointCloud degrade(const PointCloud& cloud, double dropout, double range_falloff, std::uint64_t seed);

struct PlaneSpec {
    double size_x = 0.6;
    double size_y = 0.6;
    double density = 20000.0;
    double noise_sigma = 0.001;
    /// Plane height in the output frame.
    double height = 0.0;
    std::uint64_t seed = 0;
};

/// Horizontal rectangular patch centred on the z axis, in the camera frame.
PointCloud generate_plane(const PlaneSpec& spec);

} // namespace bridgenav
