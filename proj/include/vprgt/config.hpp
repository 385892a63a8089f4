#pragma once

#include "vprgt/annotation.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace vprgt {

/// Resolved run configuration. The file form is one `key = value` per line
/// with `#` comments; see docs/formats.md for the key list.
struct PipelineConfig {
  double epsilon = 0.0;  // 0 = 1% of each trajectory's length
  double angle_threshold_deg = 30.0;
  TransformModel model = TransformModel::affine;
  double lambda = 0.25;
  double gap_penalty = 0.15;
  std::size_t window_radius = 10;
  std::vector<int> recall_n{1, 5, 10, 20};
  double threshold = 10.0;  // meters
  double units_per_meter = 1.0;
  std::filesystem::path output_dir = "runs";
  std::optional<int> vertical_axis;

  /// Sets one key from its text form; throws ValidationError on unknown
  /// keys or unparsable values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
  std::string to_text() const;
  AnnotationParams annotation_params() const;
};

PipelineConfig parse_config(const std::string& text);
PipelineConfig load_config(const std::filesystem::path& path);

std::vector<int> parse_int_list(const std::string& text);

}  // namespace vprgt
