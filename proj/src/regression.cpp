#include "isindy/regression.hpp"

namespace isindy::regression {

Eigen::VectorXd cumulative_trapezoid(const Eigen::VectorXd& v, double h) {
  if (v.size() < 2) throw Error(ErrorCode::TooShort, "regression", "need at least 2 samples");
  if (!(h > 0.0)) throw Error(ErrorCode::BadRange, "regression", "h must be positive");
  Eigen::VectorXd out(v.size() - 1);
  const double half = 0.5 * h;
  double acc = 0.0;
  for (Index k = 0; k + 1 < v.size(); ++k) {
    acc += half * (v[k] + v[k + 1]);
    out[k] = acc;
  }
  return out;
}

Eigen::VectorXd cumulative_left_rectangle(const Eigen::VectorXd& v, double h) {
  if (v.size() < 2) throw Error(ErrorCode::TooShort, "regression", "need at least 2 samples");
  if (!(h > 0.0)) throw Error(ErrorCode::BadRange, "regression", "h must be positive");
  Eigen::VectorXd out(v.size() - 1);
  double acc = 0.0;
  for (Index k = 0; k + 1 < v.size(); ++k) {
    acc += h * v[k];
    out[k] = acc;
  }
  return out;
}

Eigen::MatrixXd integrate_columns(const Eigen::MatrixXd& theta, double h) {
  Eigen::MatrixXd out(theta.rows() - 1, theta.cols());
  for (Index l = 0; l < theta.cols(); ++l) out.col(l) = cumulative_trapezoid(theta.col(l), h);
  return out;
}

IntegralRegression assemble_with_design(const Eigen::MatrixXd& integrated_theta,
                                        const StateMatrix& states, Index column) {
  if (column < 0 || column >= states.d())
    throw Error(ErrorCode::DimensionMismatch, "regression", "column index out of range");
  if (integrated_theta.rows() != states.n() - 1)
    throw Error(ErrorCode::DimensionMismatch, "regression",
                "integrated design has " + std::to_string(integrated_theta.rows()) +
                    " rows, expected " + std::to_string(states.n() - 1));
  return {integrated_theta, states.values.col(column).tail(states.n() - 1)};
}

IntegralRegression assemble_regression(const Eigen::MatrixXd& theta, const StateMatrix& states,
                                       Index column) {
  if (theta.rows() != states.n())
    throw Error(ErrorCode::DimensionMismatch, "regression",
                "Theta has " + std::to_string(theta.rows()) + " rows, states have " +
                    std::to_string(states.n()));
  return assemble_with_design(integrate_columns(theta, states.grid.h()), states, column);
}

}  // namespace isindy::regression
