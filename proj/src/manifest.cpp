#include "vprgt/manifest.hpp"

#include "vprgt/error.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace vprgt {

using nlohmann::json;

const VisitEntry& SceneManifest::visit(const std::string& visit_id) const {
  for (const auto& v : visits) {
    if (v.visit_id == visit_id) return v;
  }
  throw NotFoundError("unknown visit '" + visit_id + "' in scene '" + scene_id + "'");
}

SceneManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("manifest is not valid JSON: ") + e.what());
  }
  SceneManifest manifest;
  try {
    manifest.scene_id = doc.at("scene_id").get<std::string>();
    manifest.units_per_meter = doc.value("units_per_meter", 1.0);
    manifest.format = parse_trajectory_format(doc.value("format", std::string("tum")));
    std::set<std::string> ids;
    for (const auto& v : doc.at("visits")) {
      VisitEntry entry;
      entry.visit_id = v.at("visit_id").get<std::string>();
      std::filesystem::path traj = v.at("trajectory").get<std::string>();
      entry.trajectory = traj.is_absolute() ? traj : base_dir / traj;
      entry.duration = v.at("duration").get<double>();
      if (!ids.insert(entry.visit_id).second) {
        throw ValidationError("duplicate visit_id '" + entry.visit_id + "'");
      }
      if (!std::isfinite(entry.duration) || entry.duration <= 0.0) {
        throw ValidationError("visit '" + entry.visit_id + "' has non-positive duration");
      }
      manifest.visits.push_back(std::move(entry));
    }
    for (const auto& p : doc.at("pairs")) {
      if (!p.is_array() || p.size() != 2) {
        throw ValidationError("each pair must be a two-element list [visit_a, visit_b]");
      }
      auto a = p[0].get<std::string>();
      auto b = p[1].get<std::string>();
      for (const auto& id : {a, b}) {
        if (!ids.count(id)) {
          throw ValidationError("pair references unknown visit '" + id + "'");
        }
      }
      manifest.pairs.emplace_back(std::move(a), std::move(b));
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed manifest: ") + e.what());
  }
  if (!(manifest.units_per_meter > 0.0)) {
    throw ValidationError("units_per_meter must be positive");
  }
  return manifest;
}

SceneManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open manifest", path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_manifest(buffer.str(), path.parent_path());
}

void save_manifest(const std::filesystem::path& path, const SceneManifest& manifest) {
  json doc;
  doc["scene_id"] = manifest.scene_id;
  doc["units_per_meter"] = manifest.units_per_meter;
  doc["format"] = std::string(to_string(manifest.format));
  doc["visits"] = json::array();
  for (const auto& v : manifest.visits) {
    auto rel = v.trajectory.lexically_relative(path.parent_path());
    doc["visits"].push_back({{"visit_id", v.visit_id},
                             {"trajectory", (rel.empty() ? v.trajectory : rel).generic_string()},
                             {"duration", v.duration}});
  }
  doc["pairs"] = json::array();
  for (const auto& [a, b] : manifest.pairs) doc["pairs"].push_back({a, b});
  std::ofstream out(path);
  if (!out) throw IoError("cannot write manifest", path.string());
  out << doc.dump(2) << '\n';
}

void check_duration(const VisitEntry& visit, const Trajectory& trajectory) {
  if (visit.duration < trajectory.back().timestamp) {
    throw ValidationError("visit '" + visit.visit_id + "': video duration " +
                          format_number(visit.duration) + " s is shorter than the last keyframe (" +
                          format_number(trajectory.back().timestamp) + " s)");
  }
}

}  // namespace vprgt
