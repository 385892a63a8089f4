#pragma once

#include "vprgt/geometry.hpp"
#include "vprgt/trajectory.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace vprgt {

/// Polyline route through ordered corners. The first and last corners are
/// the route endpoints.
struct SyntheticRoute {
  std::vector<Vec2> corners;
  std::vector<double> leg_lengths;
  double total_length = 0.0;
  std::vector<double> turn_angles;       // interior corners only, degrees
  std::vector<double> corner_fractions;  // arc fraction of every corner

  Vec2 point_at_fraction(double fraction) const;
};

struct RouteParams {
  std::size_t num_corners = 6;
  double width = 100.0;
  double height = 100.0;
  double min_turn_deg = 45.0;
  double max_turn_deg = 135.0;
  double min_leg = 20.0;
  double max_leg = 45.0;
  /// Leg lengths are rounded to multiples of this when positive, so that
  /// keyframes at matching spacing land exactly on corners.
  double length_quantum = 0.0;
  std::uint64_t seed = 1;
  std::size_t max_attempts = 2000;
};

/// Random walk of corners inside [0, width] x [0, height] whose legs keep
/// a clearance of min_leg / 4 from every non-adjacent leg. Throws
/// GenerationError after max_attempts failed tries.
SyntheticRoute generate_route(const RouteParams& params);

/// Route from explicit corners.
SyntheticRoute make_route(std::vector<Vec2> corners);

enum class SpeedProfile { constant, piecewise, sinusoidal };

std::string_view to_string(SpeedProfile profile);
SpeedProfile parse_speed_profile(std::string_view name);

struct TraverseParams {
  double duration = 100.0;     // seconds
  double keyframe_rate = 1.0;  // keyframes per second
  SpeedProfile profile = SpeedProfile::constant;
  double noise_sigma = 0.0;  // per-axis Gaussian position noise
  std::uint64_t seed = 1;
  std::string scene_id = "synthetic";
  std::string visit_id = "visit";
};

/// Integrated speed profile mapping time to route arc fraction.
struct SpeedModel {
  SpeedProfile profile = SpeedProfile::constant;
  double duration = 1.0;
  std::vector<double> piece_speeds;  // piecewise: equal-length pieces
  double amplitude = 0.5;            // sinusoidal
  double cycles = 2.0;
  double phase = 0.0;

  double fraction_at(double t) const;

 private:
  double integral(double t) const;
};

struct SyntheticTraversal {
  Trajectory trajectory;
  std::vector<double> fractions;  // true route fraction per keyframe
  TraverseParams params;
  SpeedModel speed;

  double fraction_at_time(double t) const { return speed.fraction_at(t); }
};

SyntheticTraversal traverse(const SyntheticRoute& route, const TraverseParams& params);

/// Same traversal expressed in another frame: positions mapped by the
/// homogeneous `frame`, fractions untouched.
SyntheticTraversal with_frame(const SyntheticTraversal& traversal, const Eigen::Matrix3d& frame);

struct CornerMatch {
  std::size_t corner = 0;
  std::size_t keyframe_a = 0;
  std::size_t keyframe_b = 0;
};

struct TrueMatching {
  std::vector<CornerMatch> corners;  // every route corner, endpoints included
  std::function<Vec2(double)> location_at_fraction;
};

/// For each corner, the keyframe of each traversal whose true fraction is
/// closest to the corner's fraction (ties to the lower index).
TrueMatching true_matching(const SyntheticTraversal& a, const SyntheticTraversal& b,
                           const SyntheticRoute& route);

/// Two traversals of one route, A in its own (similarity-transformed) SLAM
/// frame and B in the route frame.
struct SyntheticPairParams {
  RouteParams route;
  double speed_a = 0.5;  // route units per second; durations = length / speed
  double speed_b = 1.0;
  double keyframe_rate_a = 1.0;
  double keyframe_rate_b = 1.0;
  SpeedProfile profile_a = SpeedProfile::constant;
  SpeedProfile profile_b = SpeedProfile::constant;
  double noise_sigma = 0.0;
  double frame_rotation_deg = 30.0;
  double frame_scale = 1.5;
  Vec2 frame_translation = Vec2(12.0, -7.0);
  std::uint64_t seed = 1;
};

struct SyntheticPair {
  SyntheticRoute route;
  SyntheticTraversal a;
  SyntheticTraversal b;
  Eigen::Matrix3d frame_a = Eigen::Matrix3d::Identity();
  double duration_a = 0.0;
  double duration_b = 0.0;
  TrueMatching truth;
};

/// Defaults give integer leg lengths, so constant-speed keyframes fall
/// exactly on every corner.
SyntheticPairParams default_pair_params(std::uint64_t seed, std::size_t num_corners = 6);

SyntheticPair make_synthetic_pair(const SyntheticPairParams& params);

}  // namespace vprgt
