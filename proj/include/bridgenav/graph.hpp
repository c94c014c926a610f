#pragma once

#include "bridgenav/boundary.hpp"
#include "bridgenav/segmentation.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace bridgenav {

/// Undirected weighted multigraph. Vertex names are optional labels used by
/// the edge-list format; geometric graphs name vertices by id.
struct WeightedGraph {
    struct Edge {
        int u = 0;
        int v = 0;
        double w = 0.0;
    };

    std::size_t vertex_count = 0;
    std::vector<Edge> edges;
    std::vector<std::string> names;

    double total_weight() const;
    std::string name(int v) const;
    /// Throws UnknownVertex when absent.
    int id_of(std::string_view name) const;
};

enum class VertexKind { Center, BorderMid, BarEnd };

std::string_view to_string(VertexKind k);

struct StructureGraph {
    struct Vertex {
        int id = 0;
        Point2 pos = Point2::Zero();
        VertexKind kind = VertexKind::Center;
        /// Owning cluster for Center/BarEnd, first cluster of the pair for BorderMid.
        int cluster = -1;
        int cluster_b = -1;
    };

    std::vector<Vertex> vertices;
    std::vector<WeightedGraph::Edge> edges;
    std::size_t component_count = 0;
    std::vector<std::string> warnings;

    WeightedGraph weighted() const;
};

/// Number of connected components (isolated vertices count).
std::size_t count_components(std::size_t vertex_count, const std::vector<WeightedGraph::Edge>& edges);

struct PrincipalLine {
    Point2 point = Point2::Zero();
    Point2 direction = Point2::UnitX();
    /// Covariance eigenvalues, largest first.
    double lambda_major = 0.0;
    double lambda_minor = 0.0;
};

/// Leading eigenvector of the sample covariance, oriented to positive x
/// (positive y on a tie).
PrincipalLine fit_principal_line(std::span<const Point2> points);

/// Boundary samples with the smallest and largest projection on the line.
std::pair<Point2, Point2> line_boundary_intersections(const PrincipalLine& line, const Boundary& b);

StructureGraph build_graph(const ClusterSet& cs, double d_min);

} // namespace bridgenav
