#include "vprgt/spline.hpp"

#include "vprgt/error.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <string>

namespace vprgt {

namespace {

std::size_t find_span(std::size_t last_control, int degree, double u,
                      const std::vector<double>& knots) {
  if (u >= knots[last_control + 1]) return last_control;
  std::size_t low = static_cast<std::size_t>(degree);
  std::size_t high = last_control + 1;
  std::size_t mid = (low + high) / 2;
  while (u < knots[mid] || u >= knots[mid + 1]) {
    if (u < knots[mid]) {
      high = mid;
    } else {
      low = mid;
    }
    mid = (low + high) / 2;
  }
  return mid;
}

// Non-zero basis functions N_{span-degree..span, degree}(u).
std::vector<double> basis_functions(std::size_t span, double u, int degree,
                                    const std::vector<double>& knots) {
  const auto p = static_cast<std::size_t>(degree);
  std::vector<double> n(p + 1, 0.0), left(p + 1, 0.0), right(p + 1, 0.0);
  n[0] = 1.0;
  for (std::size_t j = 1; j <= p; ++j) {
    left[j] = u - knots[span + 1 - j];
    right[j] = knots[span + j] - u;
    double saved = 0.0;
    for (std::size_t r = 0; r < j; ++r) {
      const double temp = n[r] / (right[r + 1] + left[j - r]);
      n[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    n[j] = saved;
  }
  return n;
}

}  // namespace

SplineCurve::SplineCurve(int degree, std::vector<double> knots, std::vector<Vec2> control_points)
    : degree_(degree), knots_(std::move(knots)), control_points_(std::move(control_points)) {
  if (degree_ < 1 || control_points_.size() < static_cast<std::size_t>(degree_) + 1 ||
      knots_.size() != control_points_.size() + static_cast<std::size_t>(degree_) + 1) {
    throw ValidationError("inconsistent B-spline definition");
  }
}

Vec2 SplineCurve::evaluate(double t) const {
  t = std::clamp(t, 0.0, 1.0);
  const std::size_t span = find_span(control_points_.size() - 1, degree_, t, knots_);
  const auto basis = basis_functions(span, t, degree_, knots_);
  Vec2 point = Vec2::Zero();
  const auto first = span - static_cast<std::size_t>(degree_);
  for (std::size_t j = 0; j < basis.size(); ++j) {
    point += basis[j] * control_points_[first + j];
  }
  return point;
}

SplineCurve fit_bspline(std::span<const Vec2> input) {
  if (input.size() < 2) {
    throw ValidationError("B-spline fit needs at least 2 points, got " +
                          std::to_string(input.size()));
  }
  std::vector<Vec2> points;
  points.reserve(input.size());
  for (const auto& p : input) {
    if (points.empty() || points.back() != p) points.push_back(p);
  }
  if (points.size() < 2) {
    throw DegenerateError("B-spline fit: all points identical");
  }

  const std::size_t m = points.size();
  const int degree = static_cast<int>(std::min<std::size_t>(3, m - 1));
  const auto p = static_cast<std::size_t>(degree);

  std::vector<double> params(m, 0.0);
  const auto cumulative = cumulative_arc_length(points);
  for (std::size_t k = 1; k + 1 < m; ++k) params[k] = cumulative[k] / cumulative.back();
  params[m - 1] = 1.0;

  std::vector<double> knots(m + p + 1, 0.0);
  for (std::size_t j = 1; j + p < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = j; i < j + p; ++i) sum += params[i];
    knots[j + p] = sum / static_cast<double>(p);
  }
  for (std::size_t j = m; j < m + p + 1; ++j) knots[j] = 1.0;

  std::vector<Eigen::Triplet<double>> entries;
  entries.reserve(m * (p + 1));
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t span = find_span(m - 1, degree, params[k], knots);
    const auto basis = basis_functions(span, params[k], degree, knots);
    for (std::size_t j = 0; j <= p; ++j) {
      if (basis[j] != 0.0) {
        entries.emplace_back(static_cast<int>(k), static_cast<int>(span - p + j), basis[j]);
      }
    }
  }
  Eigen::SparseMatrix<double> collocation(static_cast<Eigen::Index>(m),
                                          static_cast<Eigen::Index>(m));
  collocation.setFromTriplets(entries.begin(), entries.end());
  Eigen::MatrixXd rhs(static_cast<Eigen::Index>(m), 2);
  for (std::size_t k = 0; k < m; ++k) rhs.row(static_cast<Eigen::Index>(k)) = points[k].transpose();

  Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
  solver.compute(collocation);
  if (solver.info() != Eigen::Success) {
    throw DegenerateError("B-spline collocation matrix is singular");
  }
  const Eigen::MatrixXd solution = solver.solve(rhs);

  std::vector<Vec2> controls(m);
  for (std::size_t k = 0; k < m; ++k) controls[k] = solution.row(static_cast<Eigen::Index>(k)).transpose();
  // Clamped interpolation: end control points are the end data points.
  controls.front() = points.front();
  controls.back() = points.back();
  return SplineCurve(degree, std::move(knots), std::move(controls));
}

std::vector<Vec2> interpolate_even(const SplineCurve& curve, std::size_t n) {
  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(curve.evaluate((static_cast<double>(i) + 0.5) / static_cast<double>(n)));
  }
  return out;
}

}  // namespace vprgt
