#pragma once

#include "support.hpp"

#include "vprgt/session.hpp"

#include <cmath>

namespace testing {

// Staircase with corners at keyframes 50 and 100 of 151, one unit apart.
inline std::vector<Vec2> staircase(double turn_sign = 1.0) {
  std::vector<Vec2> pts;
  for (int i = 0; i <= 150; ++i) {
    if (i <= 50) pts.emplace_back(i, 0);
    else if (i <= 100) pts.emplace_back(50, turn_sign * (i - 50));
    else pts.emplace_back(i - 50, turn_sign * 50);
  }
  return pts;
}

inline std::vector<Vec2> transformed(const std::vector<Vec2>& pts, double deg, double scale,
                                     Vec2 t) {
  const double th = deg * 3.14159265358979323846 / 180.0;
  std::vector<Vec2> out;
  for (const auto& p : pts) {
    out.emplace_back(scale * (std::cos(th) * p.x() - std::sin(th) * p.y()) + t.x(),
                     scale * (std::sin(th) * p.x() + std::cos(th) * p.y()) + t.y());
  }
  return out;
}

struct PairFiles {
  std::filesystem::path a;
  std::filesystem::path b;
};

// A in a rotated, scaled frame sampled every 2 s; B every 1 s.
inline PairFiles write_staircase_pair(const std::filesystem::path& dir) {
  const auto a = make_trajectory(transformed(staircase(), 30, 1.5, Vec2(12, -7)), 2.0, "a", "scene");
  const auto b = make_trajectory(staircase(), 1.0, "b", "scene");
  PairFiles files{dir / "a.csv", dir / "b.csv"};
  std::filesystem::create_directories(dir);
  vprgt::save_trajectory(files.a, a, vprgt::TrajectoryFormat::csv);
  vprgt::save_trajectory(files.b, b, vprgt::TrajectoryFormat::csv);
  return files;
}

inline vprgt::SessionRequest staircase_request(const PairFiles& files) {
  vprgt::SessionRequest r;
  r.scene_id = "scene";
  r.traj_a = files.a;
  r.traj_b = files.b;
  r.duration_a = 301.0;
  r.duration_b = 151.0;
  return r;
}

}  // namespace testing
