#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace vprgt {

/// Planar topometric position.
using Vec2 = Eigen::Vector2d;

/// Selects between an OpenMP kernel and its serial reference.
enum class Exec { serial, parallel };

/// Euclidean distance from `p` to the closed segment [a, b]. Falls back to
/// point distance when a == b.
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);

/// Cumulative arc length at every vertex; front() == 0.
std::vector<double> cumulative_arc_length(std::span<const Vec2> points);

/// Sum of segment lengths.
double polyline_length(std::span<const Vec2> points);

/// Shortest round-trip decimal representation of `value`.
std::string format_number(double value);

}  // namespace vprgt
