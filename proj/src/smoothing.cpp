#include "isindy/smoothing.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

namespace isindy::smoothing {
namespace {

// Reciprocal condition below which (1 - rho) R'R + rho Q counts as singular.
constexpr double kMinRcond = 1e-14;

std::string rho_text(double rho) {
  std::ostringstream s;
  s.precision(17);
  s << "rho = " << rho;
  return s.str();
}

}  // namespace

double SplineModel::operator()(double t) const { return basis::eval_basis(knots, t).dot(b); }

PenalizedFit::PenalizedFit(const Eigen::MatrixXd& r, const Eigen::MatrixXd& q,
                           const Eigen::VectorXd& y)
    : r_(r), q_(q), y_(y) {
  if (r.rows() != y.size() || q.rows() != r.cols() || q.cols() != r.cols())
    throw Error(ErrorCode::DimensionMismatch, "smoothing", "R, Q and y shapes disagree");
  gram_ = r.transpose() * r;
  rty_ = r.transpose() * y;
}

Eigen::LDLT<Eigen::MatrixXd> PenalizedFit::factor(double rho) const {
  if (!(rho >= 0.0 && rho < 1.0))
    throw Error(ErrorCode::BadRange, "smoothing", rho_text(rho) + " outside [0, 1)");
  Eigen::MatrixXd a = (1.0 - rho) * gram_ + rho * q_;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success || !(ldlt.rcond() > kMinRcond) || !ldlt.isPositive())
    throw Error(ErrorCode::SingularSystem, "smoothing", rho_text(rho));
  return ldlt;
}

// The minimizer of (1 - rho)|y - Rb|^2 + rho b'Qb carries (1 - rho) on R'y
// as well; dropping it would inflate every fit by 1 / (1 - rho).
Eigen::VectorXd PenalizedFit::coefficients(double rho) const {
  return factor(rho).solve((1.0 - rho) * rty_);
}

std::pair<double, Eigen::VectorXd> PenalizedFit::gcv(double rho) const {
  const auto ldlt = factor(rho);
  Eigen::VectorXd b = ldlt.solve((1.0 - rho) * rty_);
  const auto n = static_cast<double>(r_.rows());
  const double rss = (y_ - r_ * b).squaredNorm();
  // S = (1 - rho) R A^{-1} R', so Trace(S) = (1 - rho) Trace(A^{-1} R'R):
  // J x J solves instead of the n x n smoother
  const double trace_s = (1.0 - rho) * ldlt.solve(gram_).trace();
  const double denom = (n - trace_s) / n;
  return {(rss / n) / (denom * denom), std::move(b)};
}

Eigen::VectorXd fit_coefficients(const Eigen::MatrixXd& r, const Eigen::MatrixXd& q,
                                 const Eigen::VectorXd& y, double rho) {
  return PenalizedFit(r, q, y).coefficients(rho);
}

double gcv_score(const Eigen::MatrixXd& r, const Eigen::MatrixXd& q, const Eigen::VectorXd& y,
                 double rho) {
  return PenalizedFit(r, q, y).gcv(rho).first;
}

std::vector<double> rho_grid(Index grid_size) {
  if (grid_size < 3) throw Error(ErrorCode::ConfigError, "smoothing", "grid_size must be >= 3");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(grid_size));
  const double step = (kLogitUpper - kLogitLower) / static_cast<double>(grid_size - 1);
  for (Index k = 0; k < grid_size; ++k) {
    const double u = kLogitLower + static_cast<double>(k) * step;
    out.push_back(1.0 / (1.0 + std::exp(-u)));
  }
  return out;
}

RhoSelection select_rho(const basis::KnotVector& knots, const Eigen::MatrixXd& r,
                        const Eigen::MatrixXd& q, const Eigen::VectorXd& y, Index grid_size) {
  const PenalizedFit fit(r, q, y);
  RhoSelection best{0.0, SplineModel{knots, {}, 0.0, std::numeric_limits<double>::infinity()}, {}};
  bool found = false;
  std::optional<Error> last_error;
  for (double rho : rho_grid(grid_size)) {
    try {
      auto [score, b] = fit.gcv(rho);
      best.scores.emplace_back(rho, score);
      // ascending rho with <= keeps the larger rho on ties
      if (std::isfinite(score) && score <= best.model.gcv) {
        best.rho = rho;
        best.model.b = std::move(b);
        best.model.rho = rho;
        best.model.gcv = score;
        found = true;
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::SingularSystem) throw;
      last_error = e;
    }
  }
  if (!found) {
    if (last_error) throw *last_error;
    throw Error(ErrorCode::SingularSystem, "smoothing", "no finite GCV score on the grid");
  }
  return best;
}

SmoothedData smooth_dataset(const ObservationSet& obs, Index num_segments, Index grid_size) {
  validate_observations(obs);
  const Index segments = num_segments > 0 ? num_segments : basis::default_segments(obs.n());
  const auto knots = basis::make_knots(obs.grid.t1(), obs.grid.tn(), segments);
  const Eigen::MatrixXd r = basis::design_matrix(knots, obs.grid);
  const Eigen::MatrixXd q = basis::penalty_matrix(knots);

  SmoothedData out{StateMatrix{obs.grid, Eigen::MatrixXd(obs.n(), obs.d())}, {}};
  for (Index i = 0; i < obs.d(); ++i) {
    const Eigen::VectorXd y = obs.values.col(i);
    try {
      auto sel = select_rho(knots, r, q, y, grid_size);
      out.states.values.col(i) = r * sel.model.b;
      out.models.push_back(std::move(sel.model));
    } catch (const Error& e) {
      throw Error(e.code(), e.module(), "column " + std::to_string(i) + ": " + e.detail());
    }
  }
  return out;
}

}  // namespace isindy::smoothing
