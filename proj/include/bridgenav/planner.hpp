#pragma once

#include "bridgenav/boundary.hpp"
#include "bridgenav/error.hpp"
#include "bridgenav/graph.hpp"
#include "bridgenav/route.hpp"
#include "bridgenav/segmentation.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace bridgenav {

/// Robot ground rectangle. Local x runs along the heading (length), local y
/// across it (width).
struct Footprint {
    double width = 0.06;
    double length = 0.1;
    Points2 offsets;

    /// Corners, edge midpoints and center of a width x length rectangle.
    static Footprint rectangle(double width, double length);
};

struct Config {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    Point2 position() const { return {x, y}; }
};

struct MotionPath {
    /// Position of the edge in the route walk.
    std::size_t step = 0;
    int u = 0;
    int v = 0;
    std::vector<Config> configs;
};

Points2 footprint_points(const Config& c, const Footprint& fp);

struct PibcParams {
    std::size_t n_candidates = 3;
    std::size_t m = 5;
    InsideRule rule = InsideRule::All;
};

/// Every projected footprint point must lie inside at least one of the
/// n_candidates boundaries whose centers are closest to it.
bool pibc_check(std::span<const Boundary> boundaries, const Config& c, const Footprint& fp,
                const PibcParams& params = {});

/// Boundaries used for collision checks. Elongated clusters are cut into
/// overlapping tiles along their principal axis (tiles also reach width/2
/// into adjacent clusters); compact clusters keep a single boundary.
std::vector<Boundary> navigation_boundaries(const ClusterSet& cs, double alpha_s);

struct RrtParams {
    double step = 0.03;
    double theta_step = 0.3;
    double goal_tol = 0.015;
    double goal_bias = 0.1;
    int max_iters = 5000;
    /// Weight of heading difference in the nearest-node metric (m/rad).
    double theta_weight = 0.3;

    static RrtParams for_footprint(const Footprint& fp);
};

/// RRT in (x, y, theta). Succeeds once a node lies within goal_tol of the goal
/// position; the exact goal is appended when reachable in a straight motion.
/// Consecutive configs differ by at most step and theta_step.
MotionPath rrt_plan(const Config& start, const Config& goal, std::span<const Boundary> boundaries,
                    const Footprint& fp, const PibcParams& pibc, const RrtParams& params,
                    std::uint64_t seed);

struct EdgeFailure {
    std::size_t step = 0;
    int u = 0;
    int v = 0;
    Errc code = Errc::NoPathFound;
    std::string message;
};

struct RouteMotion {
    std::vector<MotionPath> paths;
    std::vector<EdgeFailure> failures;
};

/// Via config at walk position k: the vertex position, heading along the
/// outgoing edge (incoming for the last vertex). An invalid via is replaced
/// by the nearest valid position on a step/4 grid aligned with that edge,
/// at most half the edge length away and never behind the vertex; positions
/// whose four grid neighbours are also valid are preferred.
Config via_config(const RoutePlan& route, const StructureGraph& g, std::size_t k,
                  std::span<const Boundary> boundaries, const Footprint& fp, const PibcParams& pibc,
                  const RrtParams& params);

/// One RRT query per walk step, each starting where the previous path ended.
/// A failed step is recorded and the next one starts from its planned via.
RouteMotion plan_route(const RoutePlan& route, const StructureGraph& g, std::span<const Boundary> boundaries,
                       const Footprint& fp, const PibcParams& pibc, const RrtParams& params,
                       std::uint64_t seed);

} // namespace bridgenav
