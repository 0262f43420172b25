#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <vector>

#include "isindy/error.hpp"

namespace isindy {

using Index = Eigen::Index;

/// Uniform sampling grid: sample k (zero based) sits at t1 + k * h.
class TimeGrid {
 public:
  TimeGrid(double t1, double h, Index n);

  /// Grid with n samples spanning [t1, tn] exactly at both ends.
  static TimeGrid spanning(double t1, double tn, Index n);
  /// Grid from t1 to (approximately) tn with step h.
  static TimeGrid with_step(double t1, double tn, double h);

  double t1() const noexcept { return t1_; }
  double h() const noexcept { return h_; }
  Index n() const noexcept { return n_; }
  double tn() const noexcept { return time(n_ - 1); }
  double time(Index k) const noexcept { return t1_ + static_cast<double>(k) * h_; }
  Eigen::VectorXd times() const;

  /// Sub-grid of samples [first, first + count).
  TimeGrid slice(Index first, Index count) const;

  bool operator==(const TimeGrid&) const = default;

 private:
  double t1_;
  double h_;
  Index n_;
};

/// Noisy measurements y(t_k), one column per state variable.
struct ObservationSet {
  TimeGrid grid;
  Eigen::MatrixXd values;  // n x d
  std::vector<std::string> labels;

  Index n() const noexcept { return values.rows(); }
  Index d() const noexcept { return values.cols(); }
};

/// Smoothed or exact states on a grid; produced by smoothing or integration.
struct StateMatrix {
  TimeGrid grid;
  Eigen::MatrixXd values;  // n x d

  Index n() const noexcept { return values.rows(); }
  Index d() const noexcept { return values.cols(); }
};

/// Sample times plus values as read from disk, before grid validation.
struct RawSeries {
  std::vector<double> times;
  Eigen::MatrixXd values;
  std::vector<std::string> labels;
};

/// Relative tolerance on |t_{k+1} - t_k - h| when accepting a time column.
inline constexpr double kGridTolerance = 1e-9;

/// Checks the uniform-grid, finiteness and length invariants.
const ObservationSet& validate_observations(const ObservationSet& obs);

/// Builds a validated ObservationSet from raw sample times and values.
ObservationSet validate_observations(const RawSeries& raw);

std::vector<std::string> default_labels(Index d);

}  // namespace isindy
