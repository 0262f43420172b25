#include "isindy/core_types.hpp"

#include <cmath>
#include <sstream>

namespace isindy {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonUniformGrid: return "NonUniformGrid";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TooShort: return "TooShort";
    case ErrorCode::BadRange: return "BadRange";
    case ErrorCode::TooFewSegments: return "TooFewSegments";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::Underdetermined: return "Underdetermined";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BlowUp: return "BlowUp";
  }
  return "Unknown";
}

bool is_input_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonUniformGrid:
    case ErrorCode::NonFinite:
    case ErrorCode::TooShort:
    case ErrorCode::BadRange:
    case ErrorCode::TooFewSegments:
    case ErrorCode::OutOfDomain:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::ParseError:
    case ErrorCode::ConfigError:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, std::string module, const std::string& detail)
    : std::runtime_error(module + ": " + std::string(to_string(code)) +
                         (detail.empty() ? "" : " (" + detail + ")")),
      code_(code),
      module_(std::move(module)),
      detail_(detail) {}

TimeGrid::TimeGrid(double t1, double h, Index n) : t1_(t1), h_(h), n_(n) {
  if (!(h > 0.0) || !std::isfinite(h) || !std::isfinite(t1))
    throw Error(ErrorCode::BadRange, "core_types", "time step must be positive and finite");
  if (n < 3)
    throw Error(ErrorCode::TooShort, "core_types", "n = " + std::to_string(n) + " < 3");
}

TimeGrid TimeGrid::spanning(double t1, double tn, Index n) {
  if (!(tn > t1)) throw Error(ErrorCode::BadRange, "core_types", "tn must exceed t1");
  if (n < 3) throw Error(ErrorCode::TooShort, "core_types", "n = " + std::to_string(n) + " < 3");
  return TimeGrid(t1, (tn - t1) / static_cast<double>(n - 1), n);
}

TimeGrid TimeGrid::with_step(double t1, double tn, double h) {
  if (!(tn > t1) || !(h > 0.0))
    throw Error(ErrorCode::BadRange, "core_types", "need tn > t1 and h > 0");
  const auto steps = static_cast<Index>(std::llround((tn - t1) / h));
  return TimeGrid(t1, h, steps + 1);
}

Eigen::VectorXd TimeGrid::times() const {
  Eigen::VectorXd t(n_);
  for (Index k = 0; k < n_; ++k) t[k] = time(k);
  return t;
}

TimeGrid TimeGrid::slice(Index first, Index count) const {
  if (first < 0 || count < 3 || first + count > n_)
    throw Error(ErrorCode::BadRange, "core_types", "grid slice out of range");
  return TimeGrid(time(first), h_, count);
}

std::vector<std::string> default_labels(Index d) {
  std::vector<std::string> out;
  for (Index i = 0; i < d; ++i) out.push_back("x" + std::to_string(i + 1));
  return out;
}

const ObservationSet& validate_observations(const ObservationSet& obs) {
  if (obs.n() < 3)
    throw Error(ErrorCode::TooShort, "core_types", "n = " + std::to_string(obs.n()) + " < 3");
  if (obs.d() < 1) throw Error(ErrorCode::DimensionMismatch, "core_types", "no data columns");
  if (obs.grid.n() != obs.n())
    throw Error(ErrorCode::DimensionMismatch, "core_types", "grid length differs from row count");
  if (!obs.labels.empty() && static_cast<Index>(obs.labels.size()) != obs.d())
    throw Error(ErrorCode::DimensionMismatch, "core_types", "label count differs from column count");
  for (Index j = 0; j < obs.d(); ++j)
    for (Index i = 0; i < obs.n(); ++i)
      if (!std::isfinite(obs.values(i, j))) {
        std::ostringstream msg;
        msg << "row " << i << ", column " << j;
        throw Error(ErrorCode::NonFinite, "core_types", msg.str());
      }
  return obs;
}

ObservationSet validate_observations(const RawSeries& raw) {
  const auto n = static_cast<Index>(raw.times.size());
  if (n < 3 || raw.values.rows() < 3)
    throw Error(ErrorCode::TooShort, "core_types", "n = " + std::to_string(n) + " < 3");
  if (raw.values.rows() != n)
    throw Error(ErrorCode::DimensionMismatch, "core_types", "time column length differs from values");
  for (Index k = 0; k < n; ++k)
    if (!std::isfinite(raw.times[k])) {
      throw Error(ErrorCode::NonFinite, "core_types", "time value at row " + std::to_string(k));
    }
  const double t1 = raw.times.front();
  const double tn = raw.times.back();
  const double h = (tn - t1) / static_cast<double>(n - 1);
  if (!(h > 0.0)) throw Error(ErrorCode::NonUniformGrid, "core_types", "times are not increasing");
  for (Index k = 1; k < n; ++k) {
    const double delta = raw.times[k] - raw.times[k - 1];
    if (std::abs(delta - h) > kGridTolerance * h) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "step " << delta << " at row " << k << " differs from h = " << h;
      throw Error(ErrorCode::NonUniformGrid, "core_types", msg.str());
    }
  }
  ObservationSet obs{TimeGrid(t1, h, n), raw.values,
                     raw.labels.empty() ? default_labels(raw.values.cols()) : raw.labels};
  validate_observations(obs);
  return obs;
}

}  // namespace isindy
