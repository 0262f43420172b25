#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "isindy/basis.hpp"
#include "isindy/core_types.hpp"

namespace isindy::smoothing {

/// A fitted penalized spline for one state variable.
struct SplineModel {
  basis::KnotVector knots;
  Eigen::VectorXd b;
  double rho = 0.0;
  double gcv = 0.0;

  double operator()(double t) const;
  /// Integrated squared second derivative, b' Q b.
  double roughness(const Eigen::MatrixXd& q) const { return b.dot(q * b); }
};

/// Penalized least squares for one column: minimizes
/// (1 - rho) |y - R b|^2 + rho b' Q b. The Gram matrix R'R and R'y are
/// computed once, so repeated fits over a rho grid stay cheap.
class PenalizedFit {
 public:
  PenalizedFit(const Eigen::MatrixXd& r, const Eigen::MatrixXd& q, const Eigen::VectorXd& y);

  Eigen::VectorXd coefficients(double rho) const;
  /// GCV(rho) and the coefficients it was computed from.
  std::pair<double, Eigen::VectorXd> gcv(double rho) const;

 private:
  Eigen::LDLT<Eigen::MatrixXd> factor(double rho) const;

  Eigen::MatrixXd r_;
  Eigen::MatrixXd q_;
  Eigen::VectorXd y_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd rty_;
};

/// b = [(1 - rho) R'R + rho Q]^{-1} (1 - rho) R'y via an LDL' factorization.
Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& r, const Eigen::MatrixXd& q,
                                 const Eigen::VectorXd& y, double rho);

/// (1/n)|(I - S)y|^2 / [(1/n) Trace(I - S)]^2 with S = (1 - rho) R A^{-1} R'.
double gcv_score(const Eigen::MatrixXd& r, const Eigen::MatrixXd& q, const Eigen::VectorXd& y,
                 double rho);

inline constexpr double kLogitLower = -24.0;
inline constexpr double kLogitUpper = 12.0;
inline constexpr Index kDefaultGridSize = 51;

/// rho values logistic(u) for u uniform on [kLogitLower, kLogitUpper].
std::vector<double> rho_grid(Index grid_size);

struct RhoSelection {
  double rho;
  SplineModel model;
  std::vector<std::pair<double, double>> scores;  // (rho, gcv) for every point that solved
};

/// Grid search for the GCV minimizer; ties go to the larger rho.
RhoSelection select_rho(const basis::KnotVector& knots, const Eigen::MatrixXd& r,
                        const Eigen::MatrixXd& q, const Eigen::VectorXd& y,
                        Index grid_size = kDefaultGridSize);

struct SmoothedData {
  StateMatrix states;
  std::vector<SplineModel> models;
};

/// Smooths every column independently on the observation grid.
/// num_segments <= 0 picks basis::default_segments(n).
SmoothedData smooth_dataset(const ObservationSet& obs, Index num_segments = 0,
                            Index grid_size = kDefaultGridSize);

}  // namespace isindy::smoothing
