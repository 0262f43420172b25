#pragma once

#include <Eigen/Dense>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isindy/core_types.hpp"
#include "isindy/sparse_model.hpp"

namespace isindy::report {

// ---- model serialization -------------------------------------------------
//
// {"d": 1, "library": ["x1", ...], "xi": [[...] per feature], "eta": [...],
//  "eta_assumed": false, "meta": {"method", "lambda", "rho_per_column", "seed"}}
//
// Keys are written in that fixed order and numbers in shortest round-trip
// form, so serialize(parse(serialize(m))) == serialize(m) byte for byte.

std::string serialize_model(const SparseModel& model);
SparseModel parse_model(const std::string& text);
void write_model(const std::filesystem::path& path, const SparseModel& model);
SparseModel read_model(const std::filesystem::path& path);

/// One line per state ("dx1/dt = 1.6000*x1 - 1.0000*x1^2") followed by one
/// initial-condition line per state ("x1(0) = 0.1000").
std::vector<std::string> equation_lines(const SparseModel& model, int decimals = 4);

/// Fixed-point number with `decimals` places; exact zero prints as "0".
std::string format_coefficient(double value, int decimals = 4);

// ---- trajectory metrics --------------------------------------------------

/// Root mean square over all entries of a - b.
double trajectory_rmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Diagonal of the bounding box spanned by the truth's states.
double attractor_diameter(const Eigen::MatrixXd& truth);

/// First grid time at which any state of `model` differs from `truth` by
/// more than fraction * attractor_diameter(truth); nullopt if never.
std::optional<double> divergence_time(const StateMatrix& truth, const Eigen::MatrixXd& model,
                                      double fraction = 0.1);

// ---- tables --------------------------------------------------------------

/// One column of a coefficient table: a model or the error that prevented it.
struct TableColumn {
  std::string header;
  std::optional<SparseModel> model;
  std::string error;  // shown as FAIL(<error>) when model is empty
};

/// Coefficient table in the layout of the printed benchmark tables: for each
/// state, an eta row then one row per feature in canonical library order.
/// Assumed (not estimated) eta prints as "---", zero coefficients as "0".
std::string coefficient_table_csv(const std::vector<std::string>& feature_names, Index d,
                                  const std::vector<TableColumn>& columns);

// ---- plots ---------------------------------------------------------------

struct PlotSeries {
  Eigen::VectorXd t;
  Eigen::MatrixXd values;  // n x d; empty if absent
};

/// Stacked per-state panels: truth red solid, identified black dashed,
/// observations as small green dots.
std::string trajectory_svg(const std::string& title, const std::vector<std::string>& labels,
                           const PlotSeries& truth, const PlotSeries& identified,
                           const PlotSeries& observations);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace isindy::report
