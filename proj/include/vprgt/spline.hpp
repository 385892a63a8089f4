#pragma once

#include "vprgt/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace vprgt {

/// Clamped B-spline curve on the parameter domain [0, 1].
class SplineCurve {
 public:
  SplineCurve(int degree, std::vector<double> knots, std::vector<Vec2> control_points);

  int degree() const noexcept { return degree_; }
  const std::vector<double>& knots() const noexcept { return knots_; }
  const std::vector<Vec2>& control_points() const noexcept { return control_points_; }

  /// Point at parameter `t`, clamped to [0, 1].
  Vec2 evaluate(double t) const;

 private:
  int degree_;
  std::vector<double> knots_;
  std::vector<Vec2> control_points_;
};

/// Cubic B-spline interpolating `points` with chord-length parameters and
/// averaged knots. Consecutive duplicates are collapsed first; the degree
/// drops to (distinct points - 1) below four points. Throws DegenerateError
/// when fewer than two distinct points remain.
SplineCurve fit_bspline(std::span<const Vec2> points);

/// `n` points at parameters (i + 0.5) / n.
std::vector<Vec2> interpolate_even(const SplineCurve& curve, std::size_t n);

}  // namespace vprgt
