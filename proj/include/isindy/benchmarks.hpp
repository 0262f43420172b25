#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "isindy/core_types.hpp"
#include "isindy/features.hpp"
#include "isindy/odeint.hpp"
#include "isindy/solver.hpp"
#include "isindy/sparse_model.hpp"

namespace isindy::benchmarks {

/// A reference system with its canonical experiment settings.
struct BenchmarkSystem {
  std::string name;
  odeint::VectorField field;
  Eigen::VectorXd eta;
  double t_start;
  double t_end;
  double h;
  double lambda;
  std::string library_spec;
  /// Smoothing spans used by the canonical run; 0 means the data-scaled default.
  Index num_segments = 0;
  /// Nonzero terms of the true vector field: (feature name, column, value).
  std::vector<std::tuple<std::string, Index, double>> true_terms;

  Index d() const noexcept { return field.d; }
  TimeGrid grid() const { return TimeGrid::with_step(t_start, t_end, h); }
  features::FeatureLibrary library() const;
  /// True coefficient matrix expressed in `lib`; terms missing from lib are dropped.
  Eigen::MatrixXd true_xi(const features::FeatureLibrary& lib) const;
};

std::vector<std::string> system_names();
/// logistic, lotka_volterra, lorenz or sine; ConfigError for anything else.
BenchmarkSystem benchmark_system(const std::string& name);

/// Exact states of `system` on [window_start, window_end] sampled with step h.
/// Integration always starts at the system's t_start from its eta, so a later
/// window sees the state the trajectory has reached by then.
StateMatrix simulate_truth(const BenchmarkSystem& system);
StateMatrix simulate_truth(const BenchmarkSystem& system, double window_start, double window_end);

struct NoiseSpec {
  double nvr = 0.0;  // noise std as a fraction of each column's std
  std::uint64_t seed = 0;
};

/// Standard normal draws from mt19937_64. Uniforms take the top 53 bits of
/// each 64-bit output; Box-Muller turns each (u1, u2) pair into two normals,
/// returned cosine branch first.
class GaussianStream {
 public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double uniform();
  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// y = x + e with e_i ~ N(0, (nvr * std(x_i))^2), population std, drawn
/// column by column from a single GaussianStream.
ObservationSet add_noise(const StateMatrix& truth, const NoiseSpec& spec,
                         std::vector<std::string> labels = {});

/// Central differences inside, one-sided first differences at both ends.
Eigen::MatrixXd finite_difference_derivatives(const ObservationSet& obs);

/// Derivative-regression baseline: dy/dt ~ Theta(y) xi, no intercept.
SparseModel sindy_identify(const ObservationSet& obs, const features::FeatureLibrary& lib,
                           const std::vector<double>& lambda,
                           const solver::StlsConfig& base = {});

/// Integral baseline with Euler quadrature and eta pinned to y(t_1).
SparseModel insindy_identify(const ObservationSet& obs, const features::FeatureLibrary& lib,
                             const std::vector<double>& lambda,
                             const solver::StlsConfig& base = {});

/// Smooth, build Theta on the smoothed states, integrate, threshold.
std::pair<SparseModel, solver::FitDiagnostics> isindy_identify(
    const ObservationSet& obs, const features::FeatureLibrary& lib,
    const std::vector<double>& lambda, Index num_segments = 0,
    const solver::StlsConfig& base = {});

enum class Method { Sindy, Insindy, Isindy };
std::string to_string(Method m);
Method parse_method(const std::string& text);

/// Runs one method and returns only the model.
SparseModel identify(Method method, const ObservationSet& obs, const features::FeatureLibrary& lib,
                     const std::vector<double>& lambda, Index num_segments = 0);

/// Largest absolute difference between model coefficients and the truth.
double max_coefficient_error(const SparseModel& model, const Eigen::MatrixXd& true_xi);

/// True when every column's support equals the nonzero rows of true_xi.
bool support_matches(const SparseModel& model, const Eigen::MatrixXd& true_xi);

}  // namespace isindy::benchmarks
