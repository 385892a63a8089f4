#include "vprgt/synthetic.hpp"

#include "vprgt/error.hpp"
#include "vprgt/turning_points.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace vprgt {

namespace {

constexpr double kPi = std::numbers::pi;

double segment_distance(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const auto cross = [](const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); };
  const Vec2 r = p2 - p1;
  const Vec2 s = q2 - q1;
  const double denom = cross(r, s);
  if (denom != 0.0) {
    const double t = cross(q1 - p1, s) / denom;
    const double u = cross(q1 - p1, r) / denom;
    if (t >= 0.0 && t <= 1.0 && u >= 0.0 && u <= 1.0) return 0.0;
  }
  return std::min({point_segment_distance(p1, q1, q2), point_segment_distance(p2, q1, q2),
                   point_segment_distance(q1, p1, p2), point_segment_distance(q2, p1, p2)});
}

bool inside(const Vec2& p, const RouteParams& params) {
  return p.x() >= 0.0 && p.x() <= params.width && p.y() >= 0.0 && p.y() <= params.height;
}

SyntheticRoute finish_route(std::vector<Vec2> corners, std::vector<double> legs) {
  SyntheticRoute route;
  route.corners = std::move(corners);
  route.leg_lengths = std::move(legs);
  route.total_length = 0.0;
  for (const double l : route.leg_lengths) route.total_length += l;
  route.corner_fractions.push_back(0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < route.leg_lengths.size(); ++i) {
    acc += route.leg_lengths[i];
    route.corner_fractions.push_back(i + 1 == route.leg_lengths.size() ? 1.0
                                                                       : acc / route.total_length);
  }
  for (std::size_t i = 1; i + 1 < route.corners.size(); ++i) {
    route.turn_angles.push_back(
        turn_angle(route.corners[i - 1], route.corners[i], route.corners[i + 1]));
  }
  return route;
}

}  // namespace

Vec2 SyntheticRoute::point_at_fraction(double fraction) const {
  const double s = std::clamp(fraction, 0.0, 1.0) * total_length;
  double start = 0.0;
  for (std::size_t i = 0; i < leg_lengths.size(); ++i) {
    const double end = start + leg_lengths[i];
    if (s <= end || i + 1 == leg_lengths.size()) {
      const double t = std::clamp((s - start) / leg_lengths[i], 0.0, 1.0);
      if (t == 1.0) return corners[i + 1];
      return corners[i] + t * (corners[i + 1] - corners[i]);
    }
    start = end;
  }
  return corners.back();
}

SyntheticRoute make_route(std::vector<Vec2> corners) {
  if (corners.size() < 2) throw ValidationError("route needs at least 2 corners");
  std::vector<double> legs;
  for (std::size_t i = 1; i < corners.size(); ++i) {
    const double l = (corners[i] - corners[i - 1]).norm();
    if (l == 0.0) throw ValidationError("consecutive route corners must be distinct");
    legs.push_back(l);
  }
  return finish_route(std::move(corners), std::move(legs));
}

SyntheticRoute generate_route(const RouteParams& params) {
  if (params.num_corners < 2) throw ValidationError("route needs at least 2 corners");
  if (!(params.min_turn_deg >= 0.0 && params.max_turn_deg <= 180.0 &&
        params.min_turn_deg <= params.max_turn_deg)) {
    throw ValidationError("turn angle range must satisfy 0 <= min <= max <= 180");
  }
  if (!(params.min_leg > 0.0 && params.max_leg >= params.min_leg)) {
    throw ValidationError("leg length range must satisfy 0 < min_leg <= max_leg");
  }
  if (!(params.width > 0.0 && params.height > 0.0)) {
    throw ValidationError("route bounds must be positive");
  }

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double clearance = params.min_leg / 4.0;

  for (std::size_t attempt = 0; attempt < params.max_attempts; ++attempt) {
    std::vector<Vec2> corners{Vec2(unit(rng) * params.width, unit(rng) * params.height)};
    std::vector<double> legs;
    double heading = unit(rng) * 2.0 * kPi;
    bool failed = false;
    for (std::size_t c = 1; c < params.num_corners && !failed; ++c) {
      bool placed = false;
      for (int tries = 0; tries < 50 && !placed; ++tries) {
        double h = heading;
        if (c > 1) {
          const double turn = params.min_turn_deg +
                              unit(rng) * (params.max_turn_deg - params.min_turn_deg);
          h += (unit(rng) < 0.5 ? -1.0 : 1.0) * turn * kPi / 180.0;
        } else {
          h = unit(rng) * 2.0 * kPi;
        }
        double len = params.min_leg + unit(rng) * (params.max_leg - params.min_leg);
        if (params.length_quantum > 0.0) {
          len = std::max(1.0, std::round(len / params.length_quantum)) * params.length_quantum;
        }
        const Vec2 next = corners.back() + len * Vec2(std::cos(h), std::sin(h));
        if (!inside(next, params)) continue;
        bool clear = true;
        for (std::size_t j = 0; j + 2 < corners.size() && clear; ++j) {
          clear = segment_distance(corners.back(), next, corners[j], corners[j + 1]) >= clearance;
        }
        if (!clear) continue;
        corners.push_back(next);
        legs.push_back(len);
        heading = h;
        placed = true;
      }
      failed = !placed;
    }
    if (failed) continue;
    auto route = finish_route(std::move(corners), std::move(legs));
    const bool angles_ok = std::all_of(
        route.turn_angles.begin(), route.turn_angles.end(),
        [&](double a) { return a >= params.min_turn_deg - 1e-9; });
    if (angles_ok) return route;
  }
  throw GenerationError("could not place " + std::to_string(params.num_corners) +
                        " corners within bounds after " + std::to_string(params.max_attempts) +
                        " attempts");
}

std::string_view to_string(SpeedProfile profile) {
  switch (profile) {
    case SpeedProfile::constant: return "constant";
    case SpeedProfile::piecewise: return "piecewise";
    case SpeedProfile::sinusoidal: return "sinusoidal";
  }
  return "constant";
}

SpeedProfile parse_speed_profile(std::string_view name) {
  if (name == "constant") return SpeedProfile::constant;
  if (name == "piecewise") return SpeedProfile::piecewise;
  if (name == "sinusoidal") return SpeedProfile::sinusoidal;
  throw ValidationError("unknown speed profile '" + std::string(name) + "'");
}

double SpeedModel::integral(double t) const {
  switch (profile) {
    case SpeedProfile::constant: return t;
    case SpeedProfile::piecewise: {
      const double piece = duration / static_cast<double>(piece_speeds.size());
      double acc = 0.0;
      for (std::size_t i = 0; i < piece_speeds.size(); ++i) {
        const double start = static_cast<double>(i) * piece;
        if (t <= start) break;
        acc += piece_speeds[i] * (std::min(t, start + piece) - start);
      }
      return acc;
    }
    case SpeedProfile::sinusoidal: {
      const double w = 2.0 * kPi * cycles / duration;
      return t - amplitude / w * (std::cos(w * t + phase) - std::cos(phase));
    }
  }
  return t;
}

double SpeedModel::fraction_at(double t) const {
  t = std::clamp(t, 0.0, duration);
  if (profile == SpeedProfile::constant) return t / duration;
  return std::clamp(integral(t) / integral(duration), 0.0, 1.0);
}

SyntheticTraversal traverse(const SyntheticRoute& route, const TraverseParams& params) {
  if (!(params.duration > 0.0) || !(params.keyframe_rate > 0.0)) {
    throw ValidationError("traversal duration and keyframe rate must be positive");
  }
  if (!(params.noise_sigma >= 0.0)) throw ValidationError("noise sigma must be non-negative");

  std::mt19937_64 rng(params.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SpeedModel speed;
  speed.profile = params.profile;
  speed.duration = params.duration;
  if (params.profile == SpeedProfile::piecewise) {
    for (int i = 0; i < 4; ++i) speed.piece_speeds.push_back(0.5 + unit(rng));
  } else if (params.profile == SpeedProfile::sinusoidal) {
    speed.phase = unit(rng) * 2.0 * kPi;
  }

  std::normal_distribution<double> noise(0.0, params.noise_sigma > 0.0 ? params.noise_sigma : 1.0);
  const auto count =
      static_cast<std::size_t>(std::floor(params.duration * params.keyframe_rate + 1e-9)) + 1;
  std::vector<Keyframe> keyframes;
  std::vector<double> fractions;
  keyframes.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) / params.keyframe_rate;
    const double f = speed.fraction_at(t);
    Vec2 p = route.point_at_fraction(f);
    if (params.noise_sigma > 0.0) {
      const double nx = noise(rng);
      const double ny = noise(rng);
      p += Vec2(nx, ny);
    }
    keyframes.push_back({t, p, std::nullopt});
    fractions.push_back(f);
  }
  return {Trajectory(params.scene_id, params.visit_id, std::move(keyframes), "synthetic"),
          std::move(fractions), params, speed};
}

SyntheticTraversal with_frame(const SyntheticTraversal& traversal, const Eigen::Matrix3d& frame) {
  std::vector<Keyframe> keyframes;
  for (const auto& kf : traversal.trajectory.keyframes()) {
    const Vec2 p = frame.topLeftCorner<2, 2>() * kf.position + frame.topRightCorner<2, 1>();
    keyframes.push_back({kf.timestamp, p, std::nullopt});
  }
  return {Trajectory(traversal.trajectory.scene_id(), traversal.trajectory.visit_id(),
                     std::move(keyframes), traversal.trajectory.source_path()),
          traversal.fractions, traversal.params, traversal.speed};
}

TrueMatching true_matching(const SyntheticTraversal& a, const SyntheticTraversal& b,
                           const SyntheticRoute& route) {
  const auto closest = [](const std::vector<double>& fractions, double target) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < fractions.size(); ++k) {
      if (std::abs(fractions[k] - target) < std::abs(fractions[best] - target)) best = k;
    }
    return best;
  };
  TrueMatching truth;
  for (std::size_t c = 0; c < route.corners.size(); ++c) {
    const double f = route.corner_fractions[c];
    truth.corners.push_back({c, closest(a.fractions, f), closest(b.fractions, f)});
  }
  truth.location_at_fraction = [route](double f) { return route.point_at_fraction(f); };
  return truth;
}

SyntheticPairParams default_pair_params(std::uint64_t seed, std::size_t num_corners) {
  SyntheticPairParams p;
  p.route.num_corners = num_corners;
  p.route.length_quantum = 1.0;
  p.route.seed = seed;
  p.seed = seed;
  return p;
}

SyntheticPair make_synthetic_pair(const SyntheticPairParams& params) {
  if (!(params.speed_a > 0.0) || !(params.speed_b > 0.0)) {
    throw ValidationError("traversal speeds must be positive");
  }
  SyntheticRoute route = generate_route(params.route);
  const double duration_a = route.total_length / params.speed_a;
  const double duration_b = route.total_length / params.speed_b;

  TraverseParams ta;
  ta.duration = duration_a;
  ta.keyframe_rate = params.keyframe_rate_a;
  ta.profile = params.profile_a;
  ta.noise_sigma = params.noise_sigma;
  ta.seed = params.seed * 2 + 1;
  ta.visit_id = "a";
  TraverseParams tb = ta;
  tb.duration = duration_b;
  tb.keyframe_rate = params.keyframe_rate_b;
  tb.profile = params.profile_b;
  tb.seed = params.seed * 2 + 2;
  tb.visit_id = "b";

  const double theta = params.frame_rotation_deg * kPi / 180.0;
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
  frame.topLeftCorner<2, 2>() << std::cos(theta), -std::sin(theta), std::sin(theta),
      std::cos(theta);
  frame.topLeftCorner<2, 2>() *= params.frame_scale;
  frame.topRightCorner<2, 1>() = params.frame_translation;

  SyntheticTraversal a = with_frame(traverse(route, ta), frame);
  SyntheticTraversal b = traverse(route, tb);
  TrueMatching truth = true_matching(a, b, route);
  return {std::move(route), std::move(a), std::move(b), frame, duration_a, duration_b,
          std::move(truth)};
}

}  // namespace vprgt
