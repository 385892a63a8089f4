#pragma once

#include "vprgt/geometry.hpp"
#include "vprgt/trajectory.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <span>
#include <string_view>

namespace vprgt {

enum class TransformModel { affine, similarity };

std::string_view to_string(TransformModel model);
TransformModel parse_transform_model(std::string_view name);

/// Homogeneous 2D transform acting on column vectors, y = M [x; 1]. By
/// convention it maps trajectory A into the reference frame of B.
struct AlignmentTransform {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
  TransformModel model = TransformModel::affine;
  double rms_residual = 0.0;
  std::size_t point_count = 0;

  Vec2 apply(const Vec2& x) const;
  AlignmentTransform inverse() const;

  static AlignmentTransform identity(TransformModel model = TransformModel::affine);
};

struct PointPair {
  Vec2 x = Vec2::Zero();  // source (trajectory A)
  Vec2 y = Vec2::Zero();  // target (trajectory B)
};

/// Least-squares fit of y ≈ M x.
///  - affine: minimises Σ‖M x_i − y_i‖² over general 2x3 maps; needs three
///    non-collinear sources.
///  - similarity: closed-form rotation, uniform scale and translation; needs
///    two distinct sources and non-coincident targets.
/// Throws DegenerateError otherwise.
AlignmentTransform fit_transform(std::span<const PointPair> pairs, TransformModel model);

double rms_residual(const Eigen::Matrix3d& matrix, std::span<const PointPair> pairs);

Trajectory align_trajectory(const Trajectory& trajectory, const AlignmentTransform& transform);

}  // namespace vprgt
