#pragma once

#include <Eigen/Dense>

#include "isindy/core_types.hpp"

namespace isindy::regression {

/// Running composite-trapezoid integrals: entry k (zero based) approximates
/// the integral of v from t_1 to t_{k+2}, i.e. (h/2) sum_{j<=k} (v_j + v_{j+1}).
/// O(n); the (n-1) x n operator is never formed.
Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& v, double h);

/// Left-rectangle (explicit Euler) counterpart: entry k is h sum_{j<=k} v_j.
Eigen::VectorXd cumulative_left_rectangle(const Eigen::VectorXd& v, double h);

/// Applies cumulative_trapezoid to each column of theta.
Eigen::MatrixXd integrate_columns(const Eigen::MatrixXd& theta, double h);

struct IntegralRegression {
  Eigen::MatrixXd design;  // (n-1) x m, C * Theta
  Eigen::VectorXd target;  // n-1, S * x_i = x_i(t_2..t_n)
};

/// Integral-form regression for state column i:
/// x_i(t_k) - eta_i ~ (integral of Theta up to t_k) xi_i, k = 2..n.
IntegralRegression assemble_regression(const Eigen::MatrixXd& theta, const StateMatrix& states,
                                       Index column);

/// Same, reusing an already integrated design (see integrate_columns).
IntegralRegression assemble_with_design(const Eigen::MatrixXd& integrated_theta,
                                        const StateMatrix& states, Index column);

}  // namespace isindy::regression
