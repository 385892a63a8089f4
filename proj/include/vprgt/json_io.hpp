#pragma once

#include "vprgt/alignment.hpp"
#include "vprgt/matching.hpp"
#include "vprgt/turning_points.hpp"

#include <json.hpp>

namespace vprgt {

nlohmann::json to_json(const TurningPoint& tp);
nlohmann::json to_json(const TurningPointSet& set);
TurningPointSet turning_point_set_from_json(const nlohmann::json& doc);

nlohmann::json to_json(const MatchList& matches);
MatchList match_list_from_json(const nlohmann::json& doc);

/// Matches with their resolved keyframes and timestamps.
nlohmann::json to_json(const MatchList& matches, const TurningPointSet& a,
                       const TurningPointSet& b);

nlohmann::json to_json(const AlignmentTransform& transform);
AlignmentTransform alignment_transform_from_json(const nlohmann::json& doc);

}  // namespace vprgt
