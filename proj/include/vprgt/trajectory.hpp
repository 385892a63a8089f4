#pragma once

#include "vprgt/geometry.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vprgt {

struct Keyframe {
  double timestamp = 0.0;  // seconds since video start
  Vec2 position = Vec2::Zero();
  std::optional<Eigen::Vector3d> raw_position_3d;
};

/// Time-ordered keyframes of one visit. Immutable once constructed; the
/// constructor enforces length >= 2, non-negative finite timestamps that
/// strictly increase, and finite positions.
class Trajectory {
 public:
  Trajectory(std::string scene_id, std::string visit_id, std::vector<Keyframe> keyframes,
             std::string source_path = {});

  const std::string& scene_id() const noexcept { return scene_id_; }
  const std::string& visit_id() const noexcept { return visit_id_; }
  const std::string& source_path() const noexcept { return source_path_; }
  const std::vector<Keyframe>& keyframes() const noexcept { return keyframes_; }

  std::size_t size() const noexcept { return keyframes_.size(); }
  const Keyframe& operator[](std::size_t i) const { return keyframes_[i]; }
  const Keyframe& front() const { return keyframes_.front(); }
  const Keyframe& back() const { return keyframes_.back(); }

  std::vector<Vec2> positions() const;

 private:
  std::string scene_id_;
  std::string visit_id_;
  std::vector<Keyframe> keyframes_;
  std::string source_path_;
};

enum class TrajectoryFormat { tum, csv };

TrajectoryFormat parse_trajectory_format(std::string_view name);
std::string_view to_string(TrajectoryFormat format);

/// Format implied by a file extension: `.csv` is CSV, everything else TUM.
TrajectoryFormat format_for_path(const std::filesystem::path& path);

struct ParseOptions {
  /// Axis (0, 1, 2) dropped when projecting 3D input to the plane. Unset
  /// selects the axis of least variance; ties go to the higher index.
  std::optional<int> vertical_axis;
  std::string scene_id;
  std::string visit_id;  // defaults to the file stem
};

Trajectory parse_trajectory(const std::filesystem::path& path, TrajectoryFormat format,
                            const ParseOptions& options = {});

Trajectory parse_trajectory_text(std::string_view text, TrajectoryFormat format,
                                 const ParseOptions& options = {},
                                 const std::string& source = "<memory>");

/// Axis chosen by the least-variance rule for the given 3D samples.
int least_variance_axis(const std::vector<Eigen::Vector3d>& points);

/// TUM output writes raw 3D when every keyframe carries it, otherwise
/// (x, y, 0); orientation is always the identity quaternion.
void write_trajectory(std::ostream& out, const Trajectory& trajectory, TrajectoryFormat format);
void save_trajectory(const std::filesystem::path& path, const Trajectory& trajectory,
                     TrajectoryFormat format);

double polyline_length(const Trajectory& trajectory);

}  // namespace vprgt
