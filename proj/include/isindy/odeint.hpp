#pragma once

#include <Eigen/Dense>

#include <functional>
#include <string>

#include "isindy/core_types.hpp"
#include "isindy/sparse_model.hpp"

namespace isindy::odeint {

/// Right-hand side of an autonomous system dx/dt = g(x).
struct VectorField {
  Index d;
  std::string name;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> rule;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return rule(x); }
};

/// States sampled on the integration grid; row 0 is the initial condition.
using Trajectory = StateMatrix;

/// States whose magnitude exceeds this are reported as a blow-up.
inline constexpr double kBlowUpMagnitude = 1e12;

/// Classical fixed-step fourth-order Runge-Kutta with step grid.h().
Trajectory rk4_integrate(const VectorField& field, const Eigen::VectorXd& eta, const TimeGrid& grid);

VectorField model_field(const SparseModel& model);

/// Integrates the identified vector field from its estimated eta.
Trajectory simulate_model(const SparseModel& model, const TimeGrid& grid);

}  // namespace isindy::odeint
