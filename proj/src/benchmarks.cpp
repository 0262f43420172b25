#include "isindy/benchmarks.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "isindy/regression.hpp"
#include "isindy/smoothing.hpp"

namespace isindy::benchmarks {
namespace {

Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Index>(values.size()));
  Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

BenchmarkSystem logistic() {
  odeint::VectorField field{1, "logistic", [](const Eigen::VectorXd& x) {
                              Eigen::VectorXd dx(1);
                              dx[0] = 1.6 * x[0] - x[0] * x[0];
                              return dx;
                            }};
  return {"logistic", std::move(field), vec({0.1}), 0.0, 6.0, 0.01, 0.1, "poly:3", 0,
          {{"x1", 0, 1.6}, {"x1^2", 0, -1.0}}};
}

BenchmarkSystem lotka_volterra() {
  odeint::VectorField field{2, "lotka_volterra", [](const Eigen::VectorXd& x) {
                              Eigen::VectorXd dx(2);
                              dx[0] = (2.0 / 3.0) * x[0] - (4.0 / 3.0) * x[0] * x[1];
                              dx[1] = -x[1] + x[0] * x[1];
                              return dx;
                            }};
  return {"lotka_volterra", std::move(field), vec({1.8, 1.8}), 0.0, 10.0, 0.01, 0.3, "poly:3", 0,
          {{"x1", 0, 2.0 / 3.0}, {"x1x2", 0, -4.0 / 3.0}, {"x2", 1, -1.0}, {"x1x2", 1, 1.0}}};
}

BenchmarkSystem lorenz() {
  odeint::VectorField field{3, "lorenz", [](const Eigen::VectorXd& x) {
                              Eigen::VectorXd dx(3);
                              dx[0] = -10.0 * x[0] + 10.0 * x[1];
                              dx[1] = 28.0 * x[0] - x[0] * x[2] - x[1];
                              dx[2] = x[0] * x[1] - (8.0 / 3.0) * x[2];
                              return dx;
                            }};
  return {"lorenz", std::move(field), vec({-5.0, 10.0, 30.0}), 0.0, 5.0, 0.005, 0.8, "poly:3", 0,
          {{"x1", 0, -10.0}, {"x2", 0, 10.0},
           {"x1", 1, 28.0}, {"x2", 1, -1.0}, {"x1x3", 1, -1.0},
           {"x1x2", 2, 1.0}, {"x3", 2, -8.0 / 3.0}}};
}

BenchmarkSystem sine() {
  odeint::VectorField field{1, "sine", [](const Eigen::VectorXd& x) {
                              Eigen::VectorXd dx(1);
                              dx[0] = -std::sin(x[0]);
                              return dx;
                            }};
  return {"sine", std::move(field), vec({0.4}), 0.0, 5.0, 0.01, 0.005, "trig:2", 0,
          {{"sin(x1)", 0, -1.0}}};
}

}  // namespace

features::FeatureLibrary BenchmarkSystem::library() const {
  return features::parse_library_spec(library_spec, d());
}

Eigen::MatrixXd BenchmarkSystem::true_xi(const features::FeatureLibrary& lib) const {
  Eigen::MatrixXd xi = Eigen::MatrixXd::Zero(lib.size(), d());
  for (const auto& [name, column, value] : true_terms) {
    const auto feature = features::parse_feature(name, d());
    const auto& all = lib.descriptors();
    const auto it = std::find(all.begin(), all.end(), feature);
    if (it != all.end()) xi(it - all.begin(), column) = value;
  }
  return xi;
}

std::vector<std::string> system_names() { return {"logistic", "lotka_volterra", "lorenz", "sine"}; }

BenchmarkSystem benchmark_system(const std::string& name) {
  if (name == "logistic") return logistic();
  if (name == "lotka_volterra") return lotka_volterra();
  if (name == "lorenz") return lorenz();
  if (name == "sine") return sine();
  throw Error(ErrorCode::ConfigError, "benchmarks", "unknown system '" + name + "'");
}

StateMatrix simulate_truth(const BenchmarkSystem& system) {
  return odeint::rk4_integrate(system.field, system.eta, system.grid());
}

StateMatrix simulate_truth(const BenchmarkSystem& system, double window_start, double window_end) {
  if (!(window_end > window_start) || window_start < system.t_start)
    throw Error(ErrorCode::BadRange, "benchmarks", "window must satisfy t_start <= a < b");
  const auto full = odeint::rk4_integrate(
      system.field, system.eta, TimeGrid::with_step(system.t_start, window_end, system.h));
  const auto first = static_cast<Index>(std::llround((window_start - system.t_start) / system.h));
  const Index count = full.n() - first;
  return StateMatrix{full.grid.slice(first, count), full.values.bottomRows(count)};
}

double GaussianStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));  // 1 - u1 lies in (0, 1]
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

ObservationSet add_noise(const StateMatrix& truth, const NoiseSpec& spec,
                         std::vector<std::string> labels) {
  if (!(spec.nvr >= 0.0 && spec.nvr < 10.0))
    throw Error(ErrorCode::ConfigError, "benchmarks", "nvr must lie in [0, 10)");
  if (!truth.values.allFinite()) throw Error(ErrorCode::NonFinite, "benchmarks", "truth states");
  if (labels.empty()) labels = default_labels(truth.d());
  ObservationSet obs{truth.grid, truth.values, std::move(labels)};
  if (spec.nvr == 0.0) return obs;

  GaussianStream stream(spec.seed);
  for (Index i = 0; i < truth.d(); ++i) {
    const auto column = truth.values.col(i);
    const double mean = column.mean();
    const double std = std::sqrt((column.array() - mean).square().mean());
    const double sigma = spec.nvr * std;
    for (Index k = 0; k < truth.n(); ++k) obs.values(k, i) += sigma * stream.next();
  }
  return obs;
}

Eigen::MatrixXd finite_difference_derivatives(const ObservationSet& obs) {
  const Index n = obs.n();
  const double h = obs.grid.h();
  Eigen::MatrixXd dy(n, obs.d());
  dy.row(0) = (obs.values.row(1) - obs.values.row(0)) / h;
  for (Index k = 1; k + 1 < n; ++k)
    dy.row(k) = (obs.values.row(k + 1) - obs.values.row(k - 1)) / (2.0 * h);
  dy.row(n - 1) = (obs.values.row(n - 1) - obs.values.row(n - 2)) / h;
  return dy;
}

namespace {

solver::StlsConfig with_lambda(solver::StlsConfig config, const std::vector<double>& lambda,
                               Index d) {
  config.lambda = lambda;
  config.validate(d);
  return config;
}

// Shared driver for the two baselines: per column STLS without intercept.
SparseModel baseline(const char* method, const features::FeatureLibrary& lib,
                     const ObservationSet& obs, const Eigen::MatrixXd& design,
                     const Eigen::MatrixXd& targets, const solver::StlsConfig& config) {
  const Index d = obs.d();
  Eigen::MatrixXd xi(lib.size(), d);
  for (Index i = 0; i < d; ++i) {
    try {
      xi.col(i) = solver::stls_column(design, targets.col(i), config.threshold(i), config, false).xi;
    } catch (const Error& e) {
      throw Error(e.code(), e.module(), std::string(method) + " column " + std::to_string(i) + ": " + e.detail());
    }
  }
  ModelMeta meta;
  meta.method = method;
  meta.lambda = config.lambda;
  return SparseModel(lib, std::move(xi), obs.values.row(0).transpose(), true, std::move(meta));
}

void check_library(const features::FeatureLibrary& lib, const ObservationSet& obs) {
  validate_observations(obs);
  if (lib.d() != obs.d())
    throw Error(ErrorCode::DimensionMismatch, "benchmarks", "library dimension differs from data");
}

}  // namespace

SparseModel sindy_identify(const ObservationSet& obs, const features::FeatureLibrary& lib,
                           const std::vector<double>& lambda, const solver::StlsConfig& base) {
  check_library(lib, obs);
  const auto config = with_lambda(base, lambda, obs.d());
  const Eigen::MatrixXd theta = features::evaluate(lib, obs.values);
  return baseline("sindy", lib, obs, theta, finite_difference_derivatives(obs), config);
}

SparseModel insindy_identify(const ObservationSet& obs, const features::FeatureLibrary& lib,
                             const std::vector<double>& lambda, const solver::StlsConfig& base) {
  check_library(lib, obs);
  const auto config = with_lambda(base, lambda, obs.d());
  const Eigen::MatrixXd theta = features::evaluate(lib, obs.values);
  const Index n = obs.n();
  Eigen::MatrixXd design(n - 1, lib.size());
  for (Index l = 0; l < lib.size(); ++l)
    design.col(l) = regression::cumulative_left_rectangle(theta.col(l), obs.grid.h());
  const Eigen::MatrixXd targets =
      obs.values.bottomRows(n - 1).rowwise() - obs.values.row(0);
  return baseline("insindy", lib, obs, design, targets, config);
}

std::pair<SparseModel, solver::FitDiagnostics> isindy_identify(
    const ObservationSet& obs, const features::FeatureLibrary& lib,
    const std::vector<double>& lambda, Index num_segments, const solver::StlsConfig& base) {
  check_library(lib, obs);
  const auto config = with_lambda(base, lambda, obs.d());
  const auto smoothed = smoothing::smooth_dataset(obs, num_segments);
  const Eigen::MatrixXd theta = features::evaluate(lib, smoothed.states);
  auto [model, diag] = solver::stls_identify(lib, theta, smoothed.states, config);
  for (const auto& spline : smoothed.models) model.meta().rho_per_column.push_back(spline.rho);
  return {std::move(model), std::move(diag)};
}

std::string to_string(Method m) {
  switch (m) {
    case Method::Sindy: return "sindy";
    case Method::Insindy: return "insindy";
    case Method::Isindy: return "isindy";
  }
  return "unknown";
}

Method parse_method(const std::string& text) {
  if (text == "sindy") return Method::Sindy;
  if (text == "insindy") return Method::Insindy;
  if (text == "isindy") return Method::Isindy;
  throw Error(ErrorCode::ConfigError, "benchmarks", "unknown method '" + text + "'");
}

SparseModel identify(Method method, const ObservationSet& obs, const features::FeatureLibrary& lib,
                     const std::vector<double>& lambda, Index num_segments) {
  switch (method) {
    case Method::Sindy: return sindy_identify(obs, lib, lambda);
    case Method::Insindy: return insindy_identify(obs, lib, lambda);
    case Method::Isindy: return isindy_identify(obs, lib, lambda, num_segments).first;
  }
  throw Error(ErrorCode::ConfigError, "benchmarks", "unknown method");
}

double max_coefficient_error(const SparseModel& model, const Eigen::MatrixXd& true_xi) {
  if (model.xi().rows() != true_xi.rows() || model.xi().cols() != true_xi.cols())
    throw Error(ErrorCode::DimensionMismatch, "benchmarks", "coefficient shapes differ");
  return (model.xi() - true_xi).cwiseAbs().maxCoeff();
}

bool support_matches(const SparseModel& model, const Eigen::MatrixXd& true_xi) {
  if (model.xi().rows() != true_xi.rows() || model.xi().cols() != true_xi.cols()) return false;
  for (Index i = 0; i < true_xi.cols(); ++i)
    for (Index l = 0; l < true_xi.rows(); ++l)
      if ((model.xi()(l, i) != 0.0) != (true_xi(l, i) != 0.0)) return false;
  return true;
}

}  // namespace isindy::benchmarks
