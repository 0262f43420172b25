#include "isindy/odeint.hpp"

#include <cmath>

namespace isindy::odeint {

Trajectory rk4_integrate(const VectorField& field, const Eigen::VectorXd& eta, const TimeGrid& grid) {
  if (eta.size() != field.d)
    throw Error(ErrorCode::DimensionMismatch, "odeint",
                "initial condition has " + std::to_string(eta.size()) + " entries, field expects " +
                    std::to_string(field.d));
  if (!eta.allFinite()) throw Error(ErrorCode::NonFinite, "odeint", "initial condition");

  const double h = grid.h();
  const double half = 0.5 * h;
  const double sixth = h / 6.0;
  Trajectory out{grid, Eigen::MatrixXd(grid.n(), field.d)};
  out.values.row(0) = eta.transpose();
  Eigen::VectorXd x = eta;
  for (Index step = 1; step < grid.n(); ++step) {
    const Eigen::VectorXd k1 = field(x);
    const Eigen::VectorXd k2 = field(x + half * k1);
    const Eigen::VectorXd k3 = field(x + half * k2);
    const Eigen::VectorXd k4 = field(x + h * k3);
    x += sixth * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite())
      throw Error(ErrorCode::NonFinite, "odeint", "state at step " + std::to_string(step));
    if (x.cwiseAbs().maxCoeff() > kBlowUpMagnitude)
      throw Error(ErrorCode::BlowUp, "odeint", "state magnitude above 1e12 at step " + std::to_string(step));
    out.values.row(step) = x.transpose();
  }
  return out;
}

VectorField model_field(const SparseModel& model) {
  return VectorField{model.d(), "identified",
                     [&model](const Eigen::VectorXd& x) { return model.vector_field(x); }};
}

Trajectory simulate_model(const SparseModel& model, const TimeGrid& grid) {
  return rk4_integrate(model_field(model), model.eta(), grid);
}

}  // namespace isindy::odeint
