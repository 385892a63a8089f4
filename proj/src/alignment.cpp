#include "vprgt/alignment.hpp"

#include "vprgt/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <string>

namespace vprgt {

namespace {

// Relative eigenvalue floor of the source scatter below which the
// configuration is treated as collinear.
constexpr double kCollinearTolerance = 1e-12;

}  // namespace

std::string_view to_string(TransformModel model) {
  return model == TransformModel::affine ? "affine" : "similarity";
}

TransformModel parse_transform_model(std::string_view name) {
  if (name == "affine") return TransformModel::affine;
  if (name == "similarity") return TransformModel::similarity;
  throw ValidationError("unknown transform model '" + std::string(name) +
                        "' (affine|similarity)");
}

Vec2 AlignmentTransform::apply(const Vec2& x) const {
  return matrix.topLeftCorner<2, 2>() * x + matrix.topRightCorner<2, 1>();
}

AlignmentTransform AlignmentTransform::inverse() const {
  AlignmentTransform inv = *this;
  const Eigen::Matrix2d linear_inv = matrix.topLeftCorner<2, 2>().inverse();
  inv.matrix.setIdentity();
  inv.matrix.topLeftCorner<2, 2>() = linear_inv;
  inv.matrix.topRightCorner<2, 1>() = -linear_inv * matrix.topRightCorner<2, 1>();
  return inv;
}

AlignmentTransform AlignmentTransform::identity(TransformModel model) {
  AlignmentTransform t;
  t.model = model;
  return t;
}

double rms_residual(const Eigen::Matrix3d& matrix, std::span<const PointPair> pairs) {
  if (pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : pairs) {
    const Vec2 mapped = matrix.topLeftCorner<2, 2>() * p.x + matrix.topRightCorner<2, 1>();
    sum += (mapped - p.y).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(pairs.size()));
}

AlignmentTransform fit_transform(std::span<const PointPair> pairs, TransformModel model) {
  const std::size_t m = pairs.size();
  Vec2 mean_x = Vec2::Zero();
  Vec2 mean_y = Vec2::Zero();
  for (const auto& p : pairs) {
    mean_x += p.x;
    mean_y += p.y;
  }
  if (m > 0) {
    mean_x /= static_cast<double>(m);
    mean_y /= static_cast<double>(m);
  }

  AlignmentTransform result;
  result.model = model;
  result.point_count = m;

  if (model == TransformModel::affine) {
    if (m < 3) {
      throw DegenerateError("need >=3 non-collinear confirmed matches for affine, got " +
                            std::to_string(m));
    }
    Eigen::Matrix2d scatter = Eigen::Matrix2d::Zero();
    for (const auto& p : pairs) {
      const Vec2 d = p.x - mean_x;
      scatter += d * d.transpose();
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(scatter);
    const double lmax = eig.eigenvalues()(1);
    const double lmin = eig.eigenvalues()(0);
    if (!(lmax > 0.0) || lmin <= kCollinearTolerance * lmax) {
      throw DegenerateError(
          "need >=3 non-collinear confirmed matches for affine; source points are collinear");
    }
    // Rows [x 1] against targets; solved for the 3x2 parameter block.
    Eigen::MatrixXd design(m, 3);
    Eigen::MatrixXd target(m, 2);
    for (std::size_t i = 0; i < m; ++i) {
      design.row(static_cast<Eigen::Index>(i)) << pairs[i].x.x(), pairs[i].x.y(), 1.0;
      target.row(static_cast<Eigen::Index>(i)) << pairs[i].y.x(), pairs[i].y.y();
    }
    const Eigen::MatrixXd params = design.colPivHouseholderQr().solve(target);
    result.matrix.setIdentity();
    result.matrix.topLeftCorner<2, 3>() = params.transpose();
  } else {
    if (m < 2) {
      throw DegenerateError("need >=2 distinct confirmed matches for similarity, got " +
                            std::to_string(m));
    }
    // Complex-number form y_c = z x_c with z = s e^{iθ}.
    double sxx = 0.0;
    double re = 0.0;
    double im = 0.0;
    for (const auto& p : pairs) {
      const Vec2 dx = p.x - mean_x;
      const Vec2 dy = p.y - mean_y;
      sxx += dx.squaredNorm();
      re += dx.x() * dy.x() + dx.y() * dy.y();
      im += dx.x() * dy.y() - dx.y() * dy.x();
    }
    if (!(sxx > 0.0)) {
      throw DegenerateError("need >=2 distinct confirmed matches for similarity; sources coincide");
    }
    const double a = re / sxx;
    const double b = im / sxx;
    if (a == 0.0 && b == 0.0) {
      throw DegenerateError("similarity fit collapsed to zero scale; targets coincide");
    }
    Eigen::Matrix2d linear;
    linear << a, -b, b, a;
    result.matrix.setIdentity();
    result.matrix.topLeftCorner<2, 2>() = linear;
    result.matrix.topRightCorner<2, 1>() = mean_y - linear * mean_x;
  }
  result.matrix.row(2) << 0.0, 0.0, 1.0;
  result.rms_residual = rms_residual(result.matrix, pairs);
  return result;
}

Trajectory align_trajectory(const Trajectory& trajectory, const AlignmentTransform& transform) {
  std::vector<Keyframe> keyframes;
  keyframes.reserve(trajectory.size());
  for (const auto& kf : trajectory.keyframes()) {
    keyframes.push_back({kf.timestamp, transform.apply(kf.position), std::nullopt});
  }
  return Trajectory(trajectory.scene_id(), trajectory.visit_id(), std::move(keyframes),
                    trajectory.source_path());
}

}  // namespace vprgt
