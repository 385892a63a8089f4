#pragma once

#include "vprgt/geometry.hpp"
#include "vprgt/trajectory.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vprgt {

enum class TurningPointOrigin { automatic, manual_added, manual_moved };

std::string_view to_string(TurningPointOrigin origin);
TurningPointOrigin parse_turning_point_origin(std::string_view name);

struct TurningPoint {
  std::size_t keyframe_index = 0;
  std::optional<double> angle_deg;  // unset for virtual endpoints and manual points
  TurningPointOrigin origin = TurningPointOrigin::automatic;
  // Cached from the trajectory at construction.
  double timestamp = 0.0;
  Vec2 position = Vec2::Zero();
  double arc_fraction = 0.0;  // cumulative arc length / total length
};

struct DetectionParams {
  double epsilon = 0.0;  // <= 0 selects 1% of the polyline length
  double angle_threshold_deg = 30.0;
};

/// Turning points of one trajectory, sorted by keyframe index, always
/// including the first and last keyframe as virtual endpoints.
struct TurningPointSet {
  std::string visit_id;
  std::size_t trajectory_size = 0;
  std::vector<TurningPoint> points;
  DetectionParams params;

  std::size_t size() const noexcept { return points.size(); }
  const TurningPoint& operator[](std::size_t i) const { return points[i]; }

  /// Position of the turning point at `keyframe_index`, if any.
  std::optional<std::size_t> find_keyframe(std::size_t keyframe_index) const;

  /// Throws ValidationError if ordering or endpoint invariants are broken.
  void validate() const;
};

TurningPoint make_turning_point(const Trajectory& trajectory, std::span<const double> cumulative,
                                std::size_t keyframe_index, std::optional<double> angle_deg,
                                TurningPointOrigin origin);

/// Iterative Ramer-Douglas-Peucker using distance to the chord segment.
/// Returns strictly increasing indices that keep the first and last point;
/// a vertex is kept when its deviation exceeds `epsilon`, ties between
/// equally distant candidates resolve to the lower index.
std::vector<std::size_t> rdp_simplify(std::span<const Vec2> points, double epsilon);

/// Heading change at `vertex` in degrees: 0 = straight on, 180 = reversal.
double turn_angle(const Vec2& prev, const Vec2& vertex, const Vec2& next);

/// Polyline simplifier: returns the simplified vertex sequence, which need
/// not be a subset of the input.
using Simplifier = std::function<std::vector<Vec2>(std::span<const Vec2>, double)>;

std::vector<Vec2> rdp_simplifier(std::span<const Vec2> points, double epsilon);

/// Index of the keyframe closest to `point`; ties resolve to the lower index.
std::size_t nearest_keyframe(std::span<const Vec2> positions, const Vec2& point);

double default_epsilon(const Trajectory& trajectory);

TurningPointSet detect_turning_points(const Trajectory& trajectory, const DetectionParams& params,
                                      const Simplifier& simplifier = rdp_simplifier);

}  // namespace vprgt
