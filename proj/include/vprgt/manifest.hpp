#pragma once

#include "vprgt/trajectory.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace vprgt {

struct VisitEntry {
  std::string visit_id;
  std::filesystem::path trajectory;  // resolved against the manifest directory
  double duration = 0.0;             // video length in seconds
};

/// Per-scene list of visits and the visit pairs to annotate. The second
/// visit of each pair is the reference (database) frame. Stored as JSON;
/// see docs/formats.md.
struct SceneManifest {
  std::string scene_id;
  double units_per_meter = 1.0;
  TrajectoryFormat format = TrajectoryFormat::tum;
  std::vector<VisitEntry> visits;
  std::vector<std::pair<std::string, std::string>> pairs;

  const VisitEntry& visit(const std::string& visit_id) const;
};

SceneManifest load_manifest(const std::filesystem::path& path);
SceneManifest parse_manifest(const std::string& json_text, const std::filesystem::path& base_dir);
void save_manifest(const std::filesystem::path& path, const SceneManifest& manifest);

/// Throws ValidationError when the video is shorter than its trajectory.
void check_duration(const VisitEntry& visit, const Trajectory& trajectory);

}  // namespace vprgt
