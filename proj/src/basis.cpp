#include "isindy/basis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace isindy::basis {
namespace {

constexpr int kOrder = KnotVector::kDegree + 1;

// Points this close to the domain ends (relative to its width) are clamped in.
constexpr double kDomainSlack = 1e-12;

double ratio(double num, double den) { return den > 0.0 ? num / den : 0.0; }

double clamp_to_domain(const KnotVector& kv, double t) {
  const double slack = kDomainSlack * (kv.upper() - kv.lower());
  if (!(t >= kv.lower() - slack && t <= kv.upper() + slack)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "t = " << t << " outside [" << kv.lower() << ", " << kv.upper() << "]";
    throw Error(ErrorCode::OutOfDomain, "basis", msg.str());
  }
  return std::clamp(t, kv.lower(), kv.upper());
}

// Cox-de Boor table restricted to the span that holds t. Returns the index of
// the first full-knot position i with b_{i,0}(t) = 1 and fills levels[p][r]
// = b_{i-p+r, p}(t) for p = 0..3, r = 0..p.
using Table = std::array<std::array<double, kOrder>, kOrder>;

Index fill_table(const KnotVector& kv, double t, Index first, Table& levels) {
  const auto& tau = kv.knots();
  const Index span = first + KnotVector::kDegree;
  for (auto& row : levels) row.fill(0.0);
  levels[0][0] = 1.0;
  for (int p = 1; p <= KnotVector::kDegree; ++p) {
    for (int r = 0; r <= p; ++r) {
      const Index i = span - p + r;
      double v = 0.0;
      // b_{i,p-1} lives at levels[p-1][r-1], b_{i+1,p-1} at levels[p-1][r]
      if (r >= 1) v += ratio(t - tau[i], tau[i + p] - tau[i]) * levels[p - 1][r - 1];
      if (r <= p - 1)
        v += ratio(tau[i + p + 1] - t, tau[i + p + 1] - tau[i + 1]) * levels[p - 1][r];
      levels[p][r] = v;
    }
  }
  return span;
}

// Second derivatives of the four cubics active on span `first`, written into out.
void second_derivatives(const KnotVector& knots, double t, Index first,
                        Eigen::Ref<Eigen::VectorXd> out) {
  Table levels;
  const Index span = fill_table(knots, t, first, levels);
  const auto& tau = knots.knots();

  // b'_{i,2} = 2 [ b_{i,1}/(tau_{i+2}-tau_i) - b_{i+1,1}/(tau_{i+3}-tau_{i+1}) ]
  // b''_{i,3} = 3 [ b'_{i,2}/(tau_{i+3}-tau_i) - b'_{i+1,2}/(tau_{i+4}-tau_{i+1}) ]
  auto b1 = [&](Index i) {
    const Index r = i - (span - 1);
    return (r >= 0 && r <= 1) ? levels[1][r] : 0.0;
  };
  auto d1_quadratic = [&](Index i) {
    return 2.0 * (ratio(b1(i), tau[i + 2] - tau[i]) - ratio(b1(i + 1), tau[i + 3] - tau[i + 1]));
  };

  for (int r = 0; r < kOrder; ++r) {
    const Index i = span - KnotVector::kDegree + r;
    out[i] = 3.0 * (ratio(d1_quadratic(i), tau[i + 3] - tau[i]) -
                    ratio(d1_quadratic(i + 1), tau[i + 4] - tau[i + 1]));
  }
}

}  // namespace

KnotVector::KnotVector(std::vector<double> breakpoints) : breakpoints_(std::move(breakpoints)) {
  if (breakpoints_.size() < 3)
    throw Error(ErrorCode::TooFewSegments, "basis", "need at least 2 spans");
  for (std::size_t i = 1; i < breakpoints_.size(); ++i)
    if (!(breakpoints_[i] > breakpoints_[i - 1]))
      throw Error(ErrorCode::BadRange, "basis", "breakpoints must be strictly increasing");
  knots_.reserve(breakpoints_.size() + 2 * KnotVector::kDegree);
  knots_.insert(knots_.end(), kDegree, breakpoints_.front());
  knots_.insert(knots_.end(), breakpoints_.begin(), breakpoints_.end());
  knots_.insert(knots_.end(), kDegree, breakpoints_.back());
}

Index KnotVector::first_active(double t) const {
  // span s covers [bp[s], bp[s+1]); basis functions s..s+3 are active there
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  Index s = static_cast<Index>(it - breakpoints_.begin()) - 1;
  return std::clamp<Index>(s, 0, num_spans() - 1);
}

KnotVector make_knots(double t1, double tn, Index num_segments) {
  if (!(tn > t1)) throw Error(ErrorCode::BadRange, "basis", "tn must exceed t1");
  if (num_segments < 2)
    throw Error(ErrorCode::TooFewSegments, "basis",
                "num_segments = " + std::to_string(num_segments));
  std::vector<double> bp(static_cast<std::size_t>(num_segments) + 1);
  const double width = (tn - t1) / static_cast<double>(num_segments);
  for (Index i = 0; i < num_segments; ++i) bp[i] = t1 + static_cast<double>(i) * width;
  bp.back() = tn;
  return KnotVector(std::move(bp));
}

Index default_segments(Index n) { return std::min<Index>(200, std::max<Index>(10, n / 5)); }

Eigen::VectorXd eval_basis(const KnotVector& knots, double t) {
  t = clamp_to_domain(knots, t);
  Table levels;
  const Index span = fill_table(knots, t, knots.first_active(t), levels);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(knots.dimension());
  for (int r = 0; r < kOrder; ++r) out[span - KnotVector::kDegree + r] = levels[3][r];
  return out;
}

Eigen::VectorXd eval_basis_d2(const KnotVector& knots, double t) {
  t = clamp_to_domain(knots, t);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(knots.dimension());
  second_derivatives(knots, t, knots.first_active(t), out);
  return out;
}

Eigen::MatrixXd design_matrix(const KnotVector& knots, const Eigen::VectorXd& times) {
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(times.size(), knots.dimension());
  Table levels;
  for (Index k = 0; k < times.size(); ++k) {
    const double t = clamp_to_domain(knots, times[k]);
    const Index span = fill_table(knots, t, knots.first_active(t), levels);
    for (int c = 0; c < kOrder; ++c) r(k, span - KnotVector::kDegree + c) = levels[3][c];
  }
  return r;
}

Eigen::MatrixXd design_matrix(const KnotVector& knots, const TimeGrid& grid) {
  return design_matrix(knots, grid.times());
}

Eigen::MatrixXd penalty_matrix(const KnotVector& knots) {
  const Index dim = knots.dimension();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  const auto& bp = knots.breakpoints();
  constexpr int m = kSimpsonSubintervals;
  Eigen::VectorXd d2 = Eigen::VectorXd::Zero(dim);
  for (Index s = 0; s < knots.num_spans(); ++s) {
    const double a = bp[s];
    const double w = (bp[s + 1] - a) / m;
    for (int k = 0; k <= m; ++k) {
      const double weight = (k == 0 || k == m ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0)) * w / 3.0;
      // both span ends are evaluated on this span's cubic piece
      const double t = (k == m) ? bp[s + 1] : a + k * w;
      second_derivatives(knots, t, s, d2);
      for (Index i = s; i < s + kOrder; ++i)
        for (Index j = s; j < s + kOrder; ++j) q(i, j) += weight * (d2[i] * d2[j]);
    }
  }
  return q;
}

}  // namespace isindy::basis
