#pragma once

#include <Eigen/Dense>

#include <vector>

#include "isindy/core_types.hpp"

namespace isindy::basis {

/// Clamped cubic knot vector over equal-width spans. The end breakpoints are
/// repeated four times, so there are J = spans + 3 basis functions.
class KnotVector {
 public:
  static constexpr int kDegree = 3;

  explicit KnotVector(std::vector<double> breakpoints);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  /// Full knot sequence including the repeated end knots.
  const std::vector<double>& knots() const noexcept { return knots_; }
  Index dimension() const noexcept { return static_cast<Index>(breakpoints_.size()) + 2; }
  Index num_spans() const noexcept { return static_cast<Index>(breakpoints_.size()) - 1; }
  double lower() const noexcept { return breakpoints_.front(); }
  double upper() const noexcept { return breakpoints_.back(); }

  /// Index of the first basis function that is nonzero on the span holding t.
  /// Spans are half open except the last, which is closed on the right.
  Index first_active(double t) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> knots_;
};

KnotVector make_knots(double t1, double tn, Index num_segments);

/// One span per five samples, clamped to [10, 200].
Index default_segments(Index n);

/// Values of all J basis functions at t (Cox-de Boor recursion).
Eigen::VectorXd eval_basis(const KnotVector& knots, double t);

/// Exact second derivatives of all J basis functions at t.
Eigen::VectorXd eval_basis_d2(const KnotVector& knots, double t);

/// R with R(k, j) = phi_j(t_k).
Eigen::MatrixXd design_matrix(const KnotVector& knots, const TimeGrid& grid);
Eigen::MatrixXd design_matrix(const KnotVector& knots, const Eigen::VectorXd& times);

/// Q(i, j) = integral of phi_i'' phi_j'' over the knot domain; composite
/// Simpson with this many subintervals per span.
inline constexpr int kSimpsonSubintervals = 8;
Eigen::MatrixXd penalty_matrix(const KnotVector& knots);

}  // namespace isindy::basis
