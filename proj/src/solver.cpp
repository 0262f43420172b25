#include "isindy/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "isindy/regression.hpp"

namespace isindy::solver {
namespace {

SeparatedFit solve(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, bool intercept,
                   double rank_tolerance) {
  const Index rows = design.rows();
  const Index k = design.cols();
  if (k < 1) throw Error(ErrorCode::DimensionMismatch, "solver", "design has no columns");
  if (target.size() != rows)
    throw Error(ErrorCode::DimensionMismatch, "solver", "target length differs from design rows");
  const Index unknowns = k + (intercept ? 1 : 0);
  if (rows < unknowns || (intercept && rows <= k))
    throw Error(ErrorCode::Underdetermined, "solver",
                std::to_string(rows) + " equations for " + std::to_string(unknowns) + " unknowns");

  // equilibrate columns so the rank test is scale free
  Eigen::MatrixXd a(rows, unknowns);
  a.leftCols(k) = design;
  if (intercept) a.col(k).setOnes();
  Eigen::VectorXd scale = a.colwise().norm().transpose();
  for (Index j = 0; j < unknowns; ++j) {
    if (!(scale[j] > 0.0) || !std::isfinite(scale[j]))
      throw Error(ErrorCode::RankDeficient, "solver",
                  "column " + std::to_string(j) + " is zero or not finite");
    a.col(j) /= scale[j];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(rows, unknowns);
  qr.setThreshold(rank_tolerance);
  qr.compute(a);
  const auto diag = qr.matrixQR().diagonal().cwiseAbs();
  const double condition = diag.maxCoeff() / diag.minCoeff();
  if (qr.rank() < unknowns) {
    std::ostringstream msg;
    msg << "rank " << qr.rank() << " of " << unknowns << ", condition estimate " << condition;
    throw Error(ErrorCode::RankDeficient, "solver", msg.str());
  }

  const Eigen::VectorXd z = qr.solve(target);
  SeparatedFit fit;
  fit.xi = z.head(k).cwiseQuotient(scale.head(k));
  fit.eta = intercept ? z[k] / scale[k] : 0.0;
  fit.residual_norm = (target - a * z).norm();
  fit.condition = condition;
  if (intercept) {
    // varrho = |(I - P) 1|^2, P projecting onto the design columns
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(rows);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qd(a.leftCols(k));
    fit.varrho = (ones - a.leftCols(k) * qd.solve(ones)).squaredNorm();
  }
  return fit;
}

Eigen::MatrixXd select_columns(const Eigen::MatrixXd& m, const std::vector<Index>& cols) {
  Eigen::MatrixXd out(m.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = m.col(cols[j]);
  return out;
}

}  // namespace

double StlsConfig::threshold(Index column) const {
  return lambda.size() == 1 ? lambda.front() : lambda.at(static_cast<std::size_t>(column));
}

void StlsConfig::validate(Index d) const {
  if (lambda.empty() || (lambda.size() != 1 && static_cast<Index>(lambda.size()) != d))
    throw Error(ErrorCode::ConfigError, "solver",
                "lambda needs 1 or " + std::to_string(d) + " entries");
  for (double l : lambda)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw Error(ErrorCode::ConfigError, "solver", "lambda must be finite and >= 0");
  if (max_iterations < 1) throw Error(ErrorCode::ConfigError, "solver", "max_iterations must be >= 1");
  if (!(rank_tolerance > 0.0)) throw Error(ErrorCode::ConfigError, "solver", "rank_tolerance must be > 0");
}

SeparatedFit ls_separated(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                          double rank_tolerance) {
  return solve(design, target, true, rank_tolerance);
}

SeparatedFit ls_no_intercept(const Eigen::MatrixXd& design, const Eigen::VectorXd& target,
                             double rank_tolerance) {
  return solve(design, target, false, rank_tolerance);
}

ColumnFit stls_column(const Eigen::MatrixXd& design, const Eigen::VectorXd& target, double lambda,
                      const StlsConfig& config, bool fit_intercept) {
  const Index m = design.cols();
  ColumnFit out;
  std::vector<Index> support(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) support[static_cast<std::size_t>(j)] = j;

  auto fit = solve(design, target, fit_intercept, config.rank_tolerance);
  out.xi = fit.xi;
  out.eta = fit.eta;
  out.varrho.push_back(fit.varrho);

  for (Index iter = 1; iter <= config.max_iterations; ++iter) {
    std::vector<Index> kept;
    for (Index j : support)
      if (std::abs(out.xi[j]) > lambda) kept.push_back(j);
    if (kept.empty())
      throw Error(ErrorCode::EmptySupport, "solver",
                  "every coefficient fell below lambda at iteration " + std::to_string(iter));

    fit = solve(select_columns(design, kept), target, fit_intercept, config.rank_tolerance);
    out.xi.setZero();
    for (std::size_t j = 0; j < kept.size(); ++j) out.xi[kept[j]] = fit.xi[static_cast<Index>(j)];
    out.eta = fit.eta;
    out.residual_norm = fit.residual_norm;
    out.condition = fit.condition;
    out.varrho.push_back(fit.varrho);
    out.iterations = iter;
    if (kept == support) {
      out.converged = true;
      break;
    }
    support = std::move(kept);
  }
  return out;
}

bool FitDiagnostics::all_converged() const {
  return std::all_of(converged.begin(), converged.end(), [](bool c) { return c; });
}

std::pair<SparseModel, FitDiagnostics> stls_identify(const features::FeatureLibrary& library,
                                                     const Eigen::MatrixXd& theta,
                                                     const StateMatrix& states,
                                                     const StlsConfig& config) {
  const Index d = states.d();
  const Index m = theta.cols();
  config.validate(d);
  if (library.d() != d || library.size() != m)
    throw Error(ErrorCode::DimensionMismatch, "solver", "library does not match Theta and states");
  if (theta.rows() != states.n())
    throw Error(ErrorCode::DimensionMismatch, "solver", "Theta rows differ from state rows");
  if (m >= states.n() - 1)
    throw Error(ErrorCode::Underdetermined, "solver",
                std::to_string(m) + " features for " + std::to_string(states.n() - 1) + " equations");

  const Eigen::MatrixXd integrated = regression::integrate_columns(theta, states.grid.h());
  Eigen::MatrixXd xi(m, d);
  Eigen::VectorXd eta(d);
  FitDiagnostics diag;
  for (Index i = 0; i < d; ++i) {
    const auto problem = regression::assemble_with_design(integrated, states, i);
    ColumnFit col;
    try {
      col = stls_column(problem.design, problem.target, config.threshold(i), config, true);
    } catch (const Error& e) {
      throw Error(e.code(), e.module(), "column " + std::to_string(i) + ": " + e.detail());
    }
    xi.col(i) = col.xi;
    eta[i] = col.eta;
    diag.iterations.push_back(col.iterations);
    diag.converged.push_back(col.converged);
    diag.residual_norm.push_back(col.residual_norm);
    diag.condition.push_back(col.condition);
    diag.varrho.push_back(std::move(col.varrho));
  }
  ModelMeta meta;
  meta.method = "isindy";
  meta.lambda = config.lambda;
  return {SparseModel(library, std::move(xi), std::move(eta), false, std::move(meta)), std::move(diag)};
}

}  // namespace isindy::solver
