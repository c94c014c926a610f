#pragma once

#include "bridgenav/boundary.hpp"
#include "bridgenav/cloud.hpp"
#include "bridgenav/planner.hpp"
#include "bridgenav/segmentation.hpp"
#include "bridgenav/switching.hpp"
#include "bridgenav/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bridgenav {

inline constexpr int kSchemaVersion = 1;

/// Every tunable of the pipeline. Optional fields left empty (null in JSON)
/// are derived from the data or from other fields at run time.
struct PipelineConfig {
    int schema_version = kSchemaVersion;
    /// Cloud file; when absent a synthetic cloud is generated.
    std::optional<std::string> input;
    std::optional<CloudFormat> input_format;
    std::uint64_t seed = 1;

    struct Synthetic {
        Shape shape = Shape::L;
        double bar_length = 1.0;
        double bar_width = 0.15;
        double density = 20000.0;
        double noise_sigma = 0.002;
        double junction_scale = 1.0;
        double dropout = 0.0;
        double range_falloff = 0.0;
    } synthetic;

    struct Plane {
        double size_x = 0.6;
        double size_y = 0.6;
        double density = 20000.0;
        double noise_sigma = 0.001;
        double height = 0.0;
    } plane;

    struct Passthrough {
        Axis axis = Axis::Z;
        double min = 0.0;
        double max = 0.0;
    };

    struct CloudStage {
        RigidTransform camera_to_base;
        std::vector<Passthrough> passthrough;
        std::optional<double> voxel_leaf;
    } cloud;

    struct BoundaryStage {
        /// Default: five times the median nearest-neighbour spacing.
        std::optional<double> alpha_s;
        /// Default: 2 * alpha_s.
        std::optional<double> eps_border;
        /// Default: max(footprint.width / 2, 2 * eps_border).
        std::optional<double> l_b;
        InsideRule inside_rule = InsideRule::All;
    } boundary;

    struct Segmentation {
        std::size_t n_cmin = 2;
        std::size_t n_cmax = 6;
        EmParams em;
    } segmentation;

    struct GraphStage {
        /// Default: footprint.length.
        std::optional<double> d_min;
    } graph;

    struct RouteStage {
        /// Defaults: lowest and highest BarEnd id (first and last vertex without BarEnds).
        std::optional<int> v_s;
        std::optional<int> v_t;
    } route;

    struct FootprintStage {
        double width = 0.06;
        double length = 0.1;
    } footprint;

    struct Planner {
        /// Defaults: width / 2 and width / 4.
        std::optional<double> step;
        std::optional<double> goal_tol;
        double theta_step = 0.3;
        double goal_bias = 0.1;
        int max_iters = 5000;
        double theta_weight = 0.3;
        std::size_t n_candidates = 3;
        std::size_t m = 5;
    } planner;

    struct Switching {
        double ransac_dist_thresh = 0.01;
        int ransac_max_iters = 500;
        double min_inlier_fraction = 0.2;
        FootParams foot;
        double alpha_s = 0.02;
        double base_height = 0.0;
        double height_tol = 0.01;
    } switching;

    /// Throws InvalidConfig naming the offending key.
    void validate() const;
};

/// Strict reader: unknown keys, wrong types and out-of-range values throw
/// InvalidConfig with the dotted key path. Missing keys keep their defaults.
PipelineConfig config_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json config_to_json(const PipelineConfig& c);
PipelineConfig load_config(const std::filesystem::path& path);

} // namespace bridgenav
