#pragma once

#include <json.hpp>

#include <string>

namespace bridgenav {

// Each renderer reads only the JSON artifact it is given.

std::string render_cloud_svg(const nlohmann::ordered_json& cloud);
std::string render_segmentation_svg(const nlohmann::ordered_json& segmentation);
std::string render_boundaries_graph_svg(const nlohmann::ordered_json& boundaries_graph);
/// Walk order drawn as numbered arrows.
std::string render_route_svg(const nlohmann::ordered_json& route);
/// Navigation tiles, motion paths and the footprint at every tenth config.
std::string render_motion_svg(const nlohmann::ordered_json& motion);
/// Plane boundary, candidate foot rectangles and the accepted pose, drawn in
/// the plane basis stored in the artifact.
std::string render_switching_svg(const nlohmann::ordered_json& switching);

} // namespace bridgenav
