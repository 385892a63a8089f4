#include "vprgt/turning_points.hpp"

#include "vprgt/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace vprgt {

std::string_view to_string(TurningPointOrigin origin) {
  switch (origin) {
    case TurningPointOrigin::automatic: return "auto";
    case TurningPointOrigin::manual_added: return "manual_added";
    case TurningPointOrigin::manual_moved: return "manual_moved";
  }
  return "auto";
}

TurningPointOrigin parse_turning_point_origin(std::string_view name) {
  if (name == "auto") return TurningPointOrigin::automatic;
  if (name == "manual_added") return TurningPointOrigin::manual_added;
  if (name == "manual_moved") return TurningPointOrigin::manual_moved;
  throw ValidationError("unknown turning point origin '" + std::string(name) + "'");
}

std::optional<std::size_t> TurningPointSet::find_keyframe(std::size_t keyframe_index) const {
  const auto it = std::lower_bound(
      points.begin(), points.end(), keyframe_index,
      [](const TurningPoint& tp, std::size_t k) { return tp.keyframe_index < k; });
  if (it == points.end() || it->keyframe_index != keyframe_index) return std::nullopt;
  return static_cast<std::size_t>(it - points.begin());
}

void TurningPointSet::validate() const {
  if (points.size() < 2 || points.front().keyframe_index != 0 ||
      points.back().keyframe_index + 1 != trajectory_size) {
    throw ValidationError("turning point set of '" + visit_id +
                          "' must include both trajectory endpoints");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (points[i].keyframe_index <= points[i - 1].keyframe_index) {
      throw ValidationError("turning point keyframe indices of '" + visit_id +
                            "' must strictly increase (position " + std::to_string(i) + ")");
    }
  }
}

TurningPoint make_turning_point(const Trajectory& trajectory, std::span<const double> cumulative,
                                std::size_t keyframe_index, std::optional<double> angle_deg,
                                TurningPointOrigin origin) {
  if (keyframe_index >= trajectory.size()) {
    throw ValidationError("keyframe index " + std::to_string(keyframe_index) +
                          " out of range for trajectory of " + std::to_string(trajectory.size()));
  }
  const double total = cumulative.back();
  TurningPoint tp;
  tp.keyframe_index = keyframe_index;
  tp.angle_deg = angle_deg;
  tp.origin = origin;
  tp.timestamp = trajectory[keyframe_index].timestamp;
  tp.position = trajectory[keyframe_index].position;
  tp.arc_fraction = total > 0.0 ? cumulative[keyframe_index] / total
                                : static_cast<double>(keyframe_index) /
                                      static_cast<double>(trajectory.size() - 1);
  return tp;
}

std::vector<std::size_t> rdp_simplify(std::span<const Vec2> points, double epsilon) {
  if (points.size() < 2) {
    throw ValidationError("RDP needs at least 2 points, got " + std::to_string(points.size()));
  }
  if (!(epsilon > 0.0)) {
    throw ValidationError("RDP epsilon must be positive");
  }
  std::vector<bool> keep(points.size(), false);
  keep.front() = keep.back() = true;

  std::vector<std::pair<std::size_t, std::size_t>> stack{{0, points.size() - 1}};
  while (!stack.empty()) {
    const auto [first, last] = stack.back();
    stack.pop_back();
    if (last <= first + 1) continue;
    double max_dist = -1.0;
    std::size_t split = first;
    for (std::size_t i = first + 1; i < last; ++i) {
      const double d = point_segment_distance(points[i], points[first], points[last]);
      if (d > max_dist) {
        max_dist = d;
        split = i;
      }
    }
    if (max_dist > epsilon) {
      keep[split] = true;
      stack.emplace_back(split, last);
      stack.emplace_back(first, split);
    }
  }

  std::vector<std::size_t> indices;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) indices.push_back(i);
  }
  return indices;
}

double turn_angle(const Vec2& prev, const Vec2& vertex, const Vec2& next) {
  const Vec2 in = vertex - prev;
  const Vec2 out = next - vertex;
  if (in.squaredNorm() == 0.0 || out.squaredNorm() == 0.0) {
    throw ValidationError("turn angle undefined for a zero-length segment");
  }
  const double cross = in.x() * out.y() - in.y() * out.x();
  return std::atan2(std::abs(cross), in.dot(out)) * 180.0 / std::numbers::pi;
}

std::vector<Vec2> rdp_simplifier(std::span<const Vec2> points, double epsilon) {
  std::vector<Vec2> out;
  for (const auto i : rdp_simplify(points, epsilon)) out.push_back(points[i]);
  return out;
}

std::size_t nearest_keyframe(std::span<const Vec2> positions, const Vec2& point) {
  std::size_t best = 0;
  double best_d2 = (positions[0] - point).squaredNorm();
  for (std::size_t i = 1; i < positions.size(); ++i) {
    const double d2 = (positions[i] - point).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return best;
}

double default_epsilon(const Trajectory& trajectory) {
  return 0.01 * polyline_length(trajectory);
}

TurningPointSet detect_turning_points(const Trajectory& trajectory, const DetectionParams& params,
                                      const Simplifier& simplifier) {
  if (!(params.angle_threshold_deg > 0.0 && params.angle_threshold_deg < 180.0)) {
    throw ValidationError("angle threshold must lie in (0, 180) degrees");
  }
  const auto positions = trajectory.positions();
  const auto cumulative = cumulative_arc_length(positions);

  TurningPointSet set;
  set.visit_id = trajectory.visit_id();
  set.trajectory_size = trajectory.size();
  set.params = params;
  if (!(set.params.epsilon > 0.0)) {
    set.params.epsilon = 0.01 * cumulative.back();
  }
  // A stationary trajectory has zero length; any positive epsilon works.
  const double epsilon = set.params.epsilon > 0.0 ? set.params.epsilon : 1.0;

  const auto simplified = simplifier(positions, epsilon);

  // (keyframe index, angle) for every qualifying interior vertex.
  std::vector<std::pair<std::size_t, double>> corners;
  for (std::size_t i = 1; i + 1 < simplified.size(); ++i) {
    const Vec2& prev = simplified[i - 1];
    const Vec2& vertex = simplified[i];
    const Vec2& next = simplified[i + 1];
    if (prev == vertex || vertex == next) continue;
    const double angle = turn_angle(prev, vertex, next);
    if (angle > params.angle_threshold_deg) {
      corners.emplace_back(nearest_keyframe(positions, vertex), angle);
    }
  }
  std::stable_sort(corners.begin(), corners.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });

  const std::size_t last = trajectory.size() - 1;
  set.points.push_back(make_turning_point(trajectory, cumulative, 0, std::nullopt,
                                          TurningPointOrigin::automatic));
  for (const auto& [index, angle] : corners) {
    if (index == 0 || index == last) continue;  // virtual endpoints win
    auto& back = set.points.back();
    if (back.keyframe_index == index) {
      if (back.angle_deg && angle > *back.angle_deg) back.angle_deg = angle;
      continue;
    }
    set.points.push_back(
        make_turning_point(trajectory, cumulative, index, angle, TurningPointOrigin::automatic));
  }
  set.points.push_back(make_turning_point(trajectory, cumulative, last, std::nullopt,
                                          TurningPointOrigin::automatic));
  return set;
}

}  // namespace vprgt
