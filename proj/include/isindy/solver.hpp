#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "isindy/core_types.hpp"
#include "isindy/features.hpp"
#include "isindy/sparse_model.hpp"

namespace isindy::solver {

struct StlsConfig {
  /// Magnitude threshold per state column; a single entry applies to all.
  std::vector<double> lambda{0.1};
  Index max_iterations = 20;
  /// Relative pivot size below which the (column-equilibrated) design is
  /// treated as rank deficient.
  double rank_tolerance = 1e-10;

  double threshold(Index column) const;
  void validate(Index d) const;
};

/// Least-squares fit of target ~ design * xi + 1 * eta.
struct SeparatedFit {
  Eigen::VectorXd xi;
  double eta = 0.0;
  /// 1'[I - P]1 with P the orthogonal projector onto the design columns.
  double varrho = 0.0;
  double residual_norm = 0.0;
  /// Ratio of largest to smallest pivot of the equilibrated factorization.
  double condition = 1.0;
};

/// Structural parameters and initial condition from the integral regression.
/// Solved as one augmented least-squares problem [design | 1] by column
/// pivoted Householder QR; algebraically identical to the separated
/// closed forms.
SeparatedFit ls_separated(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                          double rank_tolerance = 1e-10);

/// target ~ design * xi with no intercept (eta is left at 0, varrho unused).
SeparatedFit ls_no_intercept(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                             double rank_tolerance = 1e-10);

/// Result of thresholded least squares for one state column.
struct ColumnFit {
  Eigen::VectorXd xi;  // length m, exact zeros off the support
  double eta = 0.0;
  Index iterations = 0;
  bool converged = false;
  double residual_norm = 0.0;
  double condition = 1.0;
  std::vector<double> varrho;  // one entry per least-squares solve
};

/// Sequential thresholded least squares on one column. Starts from the full
/// fit, then repeatedly drops coefficients with |xi| <= lambda and refits on
/// the survivors until the support stops changing.
ColumnFit stls_column(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, double lambda,
                      const StlsConfig& config, bool fit_intercept = true);

struct FitDiagnostics {
  std::vector<Index> iterations;
  std::vector<bool> converged;
  std::vector<double> residual_norm;
  std::vector<double> condition;
  std::vector<std::vector<double>> varrho;

  bool all_converged() const;
};

/// Runs stls_column on the integral regression of every state column.
std::pair<SparseModel, FitDiagnostics> stls_identify(const features::FeatureLibrary& library,
                                                     const Eigen::MatrixXd& theta,
                                                     const StateMatrix& states,
                                                     const StlsConfig& config);

}  // namespace isindy::solver
