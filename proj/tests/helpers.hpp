#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <random>
#include <stdexcept>

#include "isindy/core_types.hpp"
#include "isindy/error.hpp"
#include "isindy/odeint.hpp"

namespace testing {

/// Runs f and returns the ErrorCode it throws; fails the test if it does not throw.
template <typename F>
isindy::ErrorCode error_code_of(F&& f) {
  try {
    f();
  } catch (const isindy::Error& e) {
    return e.code();
  }
  throw std::runtime_error("expected isindy::Error");
}

inline double max_abs_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

inline double rms(const Eigen::MatrixXd& a) {
  return std::sqrt(a.squaredNorm() / static_cast<double>(a.size()));
}

inline Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

/// States that satisfy the trapezoid discretization exactly:
/// x_{k+1} = x_k + h/2 (g(x_k) + g(x_{k+1})), solved by fixed-point iteration
/// to rounding level. The integral regression reproduces such data exactly.
inline isindy::StateMatrix trapezoid_forward(const isindy::odeint::VectorField& field,
                                             const Eigen::VectorXd& eta,
                                             const isindy::TimeGrid& grid) {
  Eigen::MatrixXd x(grid.n(), eta.size());
  x.row(0) = eta.transpose();
  const double h = grid.h();
  for (Eigen::Index k = 0; k + 1 < grid.n(); ++k) {
    const Eigen::VectorXd xk = x.row(k).transpose();
    const Eigen::VectorXd gk = field(xk);
    Eigen::VectorXd next = xk + h * gk;
    for (int it = 0; it < 200; ++it) {
      const Eigen::VectorXd update = xk + 0.5 * h * (gk + field(next));
      const double change = (update - next).cwiseAbs().maxCoeff();
      next = update;
      if (change <= 1e-16 * (1.0 + next.cwiseAbs().maxCoeff())) break;
    }
    x.row(k + 1) = next.transpose();
  }
  return {grid, x};
}

/// Explicit Euler counterpart: x_{k+1} = x_k + h g(x_k).
inline isindy::StateMatrix euler_forward(const isindy::odeint::VectorField& field,
                                         const Eigen::VectorXd& eta, const isindy::TimeGrid& grid) {
  Eigen::MatrixXd x(grid.n(), eta.size());
  x.row(0) = eta.transpose();
  for (Eigen::Index k = 0; k + 1 < grid.n(); ++k) {
    const Eigen::VectorXd xk = x.row(k).transpose();
    x.row(k + 1) = (xk + grid.h() * field(xk)).transpose();
  }
  return {grid, x};
}

}  // namespace testing
