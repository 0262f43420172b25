#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "isindy/benchmarks.hpp"
#include "isindy/sparse_model.hpp"

namespace isindy::runner {

struct TimeWindow {
  double start;
  double end;
  bool operator==(const TimeWindow&) const = default;
};

/// Everything a CLI command needs. Empty lists mean "use the default for
/// the command or the system's canonical setting".
struct RunConfig {
  std::string system;
  std::filesystem::path input;
  std::filesystem::path model;
  std::filesystem::path output_dir = "out";
  std::vector<std::string> libraries;
  std::vector<double> lambda;
  std::vector<double> nvr{0.0};
  std::vector<std::uint64_t> seeds{1};
  Index segments = 0;
  std::vector<benchmarks::Method> methods;
  std::vector<TimeWindow> windows;
  std::vector<Eigen::VectorXd> ics;
  std::optional<double> step;
  int jobs = 1;

  /// Range and consistency checks that do not depend on the command.
  void validate() const;
};

/// Keys accepted by apply_option and in config files (flag names without "--").
const std::vector<std::string>& option_keys();

/// Parses `value` in flag syntax and stores it; ConfigError on unknown keys
/// or malformed values.
///   nvr, lambda      comma list of numbers             0,0.1,0.3
///   seeds            comma list of integers or ranges  1..20  or  1,4,9
///   time-range       comma list of start:end windows   0:3,3:7
///   ic               ';'-separated vectors             1.8,1.8  or  -1;-0.8
///   library, method  comma lists
void apply_option(RunConfig& config, const std::string& key, const std::string& value);

/// Applies a flat JSON object of options. Arrays are joined with commas
/// (nested arrays, for ic, with ';'); unknown keys are rejected.
void apply_config_file(RunConfig& config, const std::filesystem::path& path);
void apply_config_text(RunConfig& config, const std::string& text);

// ---- benchmark sweep ------------------------------------------------------

struct CellResult {
  benchmarks::Method method;
  double nvr;
  std::uint64_t seed;
  TimeWindow window;
  std::string library;
  Eigen::VectorXd ic;
  // index of each coordinate in the sweep, used for grouping and naming
  std::size_t method_index, nvr_index, seed_index, window_index, library_index, ic_index;

  std::optional<SparseModel> model;
  std::string error;  // "<ErrorCode>: <detail>" when identification failed
  std::string error_code;

  /// Set only when every true term is present in the library.
  std::optional<bool> support_correct;
  std::optional<double> max_coefficient_error;
  std::optional<double> rmse;
  std::optional<double> divergence_time;
  std::string simulation_error;

  // kept for the first seed only, for plotting
  std::optional<StateMatrix> truth;
  std::optional<ObservationSet> observations;
  std::optional<Eigen::MatrixXd> identified;
};

struct BenchmarkReport {
  benchmarks::BenchmarkSystem system;
  std::vector<benchmarks::Method> methods;
  std::vector<double> nvr;
  std::vector<std::uint64_t> seeds;
  std::vector<TimeWindow> windows;
  std::vector<std::string> libraries;
  std::vector<Eigen::VectorXd> ics;
  std::vector<CellResult> cells;  // ordered by (window, library, ic, method, nvr, seed)

  std::size_t failures() const;
};

/// Runs every (method, nvr, seed, window, library, ic) cell, up to
/// config.jobs at a time. A failing cell records its error; the sweep goes on.
BenchmarkReport run_benchmark(const RunConfig& config);

/// Writes tables, long-format CSVs, the support summary and SVG plots under
/// `dir`; returns the paths written.
std::vector<std::filesystem::path> write_benchmark(const BenchmarkReport& report,
                                                   const std::filesystem::path& dir);

/// Human-readable support-recovery lines, one per (window, library, ic, method, nvr).
std::vector<std::string> support_summary(const BenchmarkReport& report);

}  // namespace isindy::runner
