#pragma once

#include "bridgenav/config.hpp"
#include "bridgenav/graph.hpp"
#include "bridgenav/planner.hpp"
#include "bridgenav/route.hpp"
#include "bridgenav/segmentation.hpp"
#include "bridgenav/switching.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bridgenav {

using Json = nlohmann::ordered_json;

enum ExitCode { kExitOk = 0, kExitError = 1, kExitPartial = 2 };

/// A library error tagged with the pipeline stage that raised it.
class StageError : public std::runtime_error {
public:
    StageError(std::string stage, Errc code, const std::string& what)
        : std::runtime_error(stage + ": " + what), stage_(std::move(stage)), code_(code)
    {
    }

    const std::string& stage() const noexcept { return stage_; }
    Errc code() const noexcept { return code_; }

private:
    std::string stage_;
    Errc code_;
};

/// File name and exact bytes of one output file.
struct Artifact {
    std::string name;
    std::string content;
};

struct RunOutput {
    int exit_code = kExitOk;
    std::vector<Artifact> artifacts;
};

/// Loads config.input (format from input_format or the extension) or, when
/// absent, generates the configured synthetic structure (plane = true: the
/// plane patch). Pass-through and voxel filters run on the camera-frame cloud.
PointCloud ingest(const PipelineConfig& config, bool plane);

/// Parameters derived from the data when the config leaves them empty.
struct ResolvedParams {
    double alpha_s = 0.0;
    double eps_border = 0.0;
    double l_b = 0.0;
    double d_min = 0.0;
    int v_s = 0;
    int v_t = 0;
    RrtParams rrt;
    PibcParams pibc;
    Footprint footprint;
};

struct Navigation {
    PointCloud cloud;
    ClusterSet clusters;
    StructureGraph graph;
    RoutePlan route;
    std::vector<Boundary> tiles;
    RouteMotion motion;
    ResolvedParams params;

    bool complete() const;
};

/// Full navigation chain. Throws StageError naming the failing stage.
Navigation run_navigation(const PipelineConfig& config);

/// cloud, segmentation, boundaries_graph, route and motion_paths as JSON
/// with an SVG view each; failures.json is added when a plan failed.
RunOutput navigation_artifacts(const Navigation& nav, const PipelineConfig& config);

struct Switching {
    std::size_t input_points = 0;
    std::optional<PlanePatch> plane;
    std::string plane_message;
    Boundary3 boundary;
    AreaCheckResult area;
    std::optional<Point3> centroid_base;
    SwitchDecision decision;
};

/// Plane, area and height checks. Missing or degenerate planes give Stop.
Switching run_switching(const PipelineConfig& config);

RunOutput switching_artifacts(const Switching& sw, const PipelineConfig& config);

struct SolveResult {
    WeightedGraph graph;
    RoutePlan route;
    std::optional<RoutePlan> oracle;
    std::string oracle_message;
};

/// VOCPP on an edge-list file; with_oracle adds the brute-force optimum.
SolveResult solve_graph(const std::filesystem::path& edge_list, const std::string& from, const std::string& to,
                        bool with_oracle);

Json solve_json(const SolveResult& r, const std::string& from, const std::string& to);

/// Synthetic cloud as CSV plus a ground-truth JSON sidecar.
RunOutput synth_artifacts(const PipelineConfig& config, bool plane);

/// Writes every artifact below dir, creating it when needed.
void write_artifacts(const RunOutput& out, const std::filesystem::path& dir);

} // namespace bridgenav
