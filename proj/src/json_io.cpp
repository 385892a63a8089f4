#include "vprgt/json_io.hpp"

#include "vprgt/error.hpp"

namespace vprgt {

using nlohmann::json;

json to_json(const TurningPoint& tp) {
  return {{"keyframe_index", tp.keyframe_index},
          {"angle_deg", tp.angle_deg ? json(*tp.angle_deg) : json(nullptr)},
          {"origin", std::string(to_string(tp.origin))},
          {"timestamp", tp.timestamp},
          {"x", tp.position.x()},
          {"y", tp.position.y()},
          {"arc_fraction", tp.arc_fraction}};
}

json to_json(const TurningPointSet& set) {
  json points = json::array();
  for (const auto& tp : set.points) points.push_back(to_json(tp));
  return {{"visit_id", set.visit_id},
          {"trajectory_size", set.trajectory_size},
          {"epsilon", set.params.epsilon},
          {"angle_threshold_deg", set.params.angle_threshold_deg},
          {"points", std::move(points)}};
}

TurningPointSet turning_point_set_from_json(const json& doc) {
  try {
    TurningPointSet set;
    set.visit_id = doc.at("visit_id").get<std::string>();
    set.trajectory_size = doc.at("trajectory_size").get<std::size_t>();
    set.params.epsilon = doc.at("epsilon").get<double>();
    set.params.angle_threshold_deg = doc.at("angle_threshold_deg").get<double>();
    for (const auto& p : doc.at("points")) {
      TurningPoint tp;
      tp.keyframe_index = p.at("keyframe_index").get<std::size_t>();
      if (!p.at("angle_deg").is_null()) tp.angle_deg = p.at("angle_deg").get<double>();
      tp.origin = parse_turning_point_origin(p.at("origin").get<std::string>());
      tp.timestamp = p.at("timestamp").get<double>();
      tp.position = Vec2(p.at("x").get<double>(), p.at("y").get<double>());
      tp.arc_fraction = p.at("arc_fraction").get<double>();
      set.points.push_back(tp);
    }
    set.validate();
    return set;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed turning point set: ") + e.what());
  }
}

json to_json(const MatchList& matches) {
  json out = json::array();
  for (const auto& m : matches) {
    out.push_back({{"index_a", m.index_a},
                   {"index_b", m.index_b},
                   {"status", std::string(to_string(m.status))}});
  }
  return out;
}

MatchList match_list_from_json(const json& doc) {
  try {
    MatchList matches;
    for (const auto& m : doc) {
      matches.push_back({m.at("index_a").get<std::size_t>(), m.at("index_b").get<std::size_t>(),
                         parse_match_status(m.at("status").get<std::string>())});
    }
    return matches;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed match list: ") + e.what());
  }
}

json to_json(const MatchList& matches, const TurningPointSet& a, const TurningPointSet& b) {
  json out = json::array();
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& m = matches[i];
    out.push_back({{"position", i},
                   {"index_a", m.index_a},
                   {"index_b", m.index_b},
                   {"status", std::string(to_string(m.status))},
                   {"keyframe_a", a[m.index_a].keyframe_index},
                   {"keyframe_b", b[m.index_b].keyframe_index},
                   {"timestamp_a", a[m.index_a].timestamp},
                   {"timestamp_b", b[m.index_b].timestamp}});
  }
  return out;
}

json to_json(const AlignmentTransform& transform) {
  json rows = json::array();
  for (int r = 0; r < 3; ++r) {
    rows.push_back({transform.matrix(r, 0), transform.matrix(r, 1), transform.matrix(r, 2)});
  }
  return {{"model", std::string(to_string(transform.model))},
          {"matrix", std::move(rows)},
          {"rms_residual", transform.rms_residual},
          {"point_count", transform.point_count}};
}

AlignmentTransform alignment_transform_from_json(const json& doc) {
  try {
    AlignmentTransform t;
    t.model = parse_transform_model(doc.at("model").get<std::string>());
    const auto& rows = doc.at("matrix");
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) t.matrix(r, c) = rows.at(r).at(c).get<double>();
    }
    t.rms_residual = doc.at("rms_residual").get<double>();
    t.point_count = doc.at("point_count").get<std::size_t>();
    return t;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed transform: ") + e.what());
  }
}

}  // namespace vprgt
