// Command-line front end: simulate, smooth, identify, benchmark.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "isindy/benchmarks.hpp"
#include "isindy/csv.hpp"
#include "isindy/odeint.hpp"
#include "isindy/report.hpp"
#include "isindy/runner.hpp"
#include "isindy/smoothing.hpp"

namespace fs = std::filesystem;
using namespace isindy;

namespace {

constexpr int kExitPartial = 1;
constexpr int kExitInput = 2;

struct Flags {
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config;
  CLI::Option* config_option = nullptr;

  bool given(const std::string& key) const {
    const auto it = options.find(key);
    return it != options.end() && it->second->count() > 0;
  }
};

void add_shared_flags(CLI::App& cmd, Flags& flags) {
  static const std::map<std::string, std::string> help{
      {"system", "benchmark system: logistic, lotka_volterra, lorenz, sine"},
      {"input", "observation CSV (header t,x1,...)"},
      {"model", "model JSON to simulate"},
      {"output-dir", "directory for results (default: out)"},
      {"library", "feature library spec, e.g. poly:3 or poly:3+trig:2; comma list for sweeps"},
      {"lambda", "threshold, one value or one per state"},
      {"nvr", "noise-variance ratios, e.g. 0,0.1,0.3"},
      {"seeds", "noise seeds, e.g. 1..20 or 1,5,9"},
      {"seed", "single noise seed"},
      {"segments", "spline segments (0 = data-scaled default)"},
      {"method", "isindy, sindy or insindy (comma list for benchmark)"},
      {"time-range", "start:end window(s), comma separated"},
      {"ic", "initial condition(s): comma-separated vector, ';' between vectors"},
      {"step", "time step h"},
      {"jobs", "benchmark cells run concurrently"},
  };
  for (const auto& key : runner::option_keys())
    flags.options[key] = cmd.add_option("--" + key, flags.values[key], help.at(key));
  flags.config_option = cmd.add_option("--config", flags.config, "flat JSON config; flags override it");
}

runner::RunConfig build_config(const Flags& flags) {
  runner::RunConfig config;
  if (flags.config_option->count() > 0) runner::apply_config_file(config, flags.config);
  for (const auto& key : runner::option_keys())
    if (flags.given(key)) runner::apply_option(config, key, flags.values.at(key));
  return config;
}

void print_path(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

int cmd_simulate(const runner::RunConfig& config) {
  StateMatrix truth{TimeGrid(0.0, 1.0, 3), {}};
  if (!config.model.empty()) {
    const SparseModel model = report::read_model(config.model);
    if (config.windows.empty())
      throw Error(ErrorCode::ConfigError, "cli_report", "simulating a model needs --time-range");
    const auto& w = config.windows.front();
    const Eigen::VectorXd eta = config.ics.empty() ? model.eta() : config.ics.front();
    truth = odeint::rk4_integrate(odeint::model_field(model), eta,
                                  TimeGrid::with_step(w.start, w.end, config.step.value_or(0.01)));
  } else {
    if (config.system.empty())
      throw Error(ErrorCode::ConfigError, "cli_report", "simulate needs --system or --model");
    auto system = benchmarks::benchmark_system(config.system);
    if (config.step) system.h = *config.step;
    if (!config.ics.empty()) {
      if (config.ics.front().size() != system.d())
        throw Error(ErrorCode::ConfigError, "cli_report",
                    "ic needs " + std::to_string(system.d()) + " components");
      system.eta = config.ics.front();
    }
    const auto w = config.windows.empty() ? runner::TimeWindow{system.t_start, system.t_end}
                                          : config.windows.front();
    truth = benchmarks::simulate_truth(system, w.start, w.end);
  }

  const auto labels = default_labels(truth.d());
  const fs::path truth_path = config.output_dir / "truth.csv";
  csv::write_file(truth_path, truth.grid, truth.values, labels);
  print_path(truth_path);

  const bool single = config.nvr.size() == 1 && config.seeds.size() == 1;
  for (double nvr : config.nvr) {
    if (nvr == 0.0) continue;
    for (auto seed : config.seeds) {
      const auto obs = benchmarks::add_noise(truth, {nvr, seed}, labels);
      char name[96];
      if (single) std::snprintf(name, sizeof name, "observations.csv");
      else std::snprintf(name, sizeof name, "observations_nvr%g_seed%llu.csv", nvr * 100.0,
                         static_cast<unsigned long long>(seed));
      const fs::path path = config.output_dir / name;
      csv::write_file(path, obs.grid, obs.values, obs.labels);
      print_path(path);
    }
  }
  return 0;
}

int cmd_smooth(const runner::RunConfig& config) {
  if (config.input.empty()) throw Error(ErrorCode::ConfigError, "cli_report", "smooth needs --input");
  const ObservationSet obs = csv::read_observations(config.input);
  const auto smoothed = smoothing::smooth_dataset(obs, config.segments);

  const fs::path states_path = config.output_dir / "smoothed.csv";
  csv::write_file(states_path, smoothed.states.grid, smoothed.states.values, obs.labels);
  std::string summary = "column,label,rho,gcv,segments\n";
  for (std::size_t i = 0; i < smoothed.models.size(); ++i) {
    const auto& m = smoothed.models[i];
    summary += std::to_string(i + 1) + "," + obs.labels[i] + "," + csv::format_double(m.rho) + "," +
               csv::format_double(m.gcv) + "," + std::to_string(m.knots.num_spans()) + "\n";
    std::printf("%s: rho = %.6g, gcv = %.6g\n", obs.labels[i].c_str(), m.rho, m.gcv);
  }
  const fs::path summary_path = config.output_dir / "smoothing.csv";
  report::write_text(summary_path, summary);
  print_path(states_path);
  print_path(summary_path);
  return 0;
}

int cmd_identify(const runner::RunConfig& config, bool seed_given) {
  if (config.input.empty()) throw Error(ErrorCode::ConfigError, "cli_report", "identify needs --input");
  if (config.libraries.size() > 1 || config.methods.size() > 1)
    throw Error(ErrorCode::ConfigError, "cli_report", "identify takes one library and one method");
  const ObservationSet obs = csv::read_observations(config.input);
  const auto lib = features::parse_library_spec(
      config.libraries.empty() ? std::string("poly:3") : config.libraries.front(), obs.d());
  const std::vector<double> lambda = config.lambda.empty() ? std::vector{0.1} : config.lambda;
  const auto method = config.methods.empty() ? benchmarks::Method::Isindy : config.methods.front();

  std::optional<SparseModel> model;
  if (method == benchmarks::Method::Isindy) {
    auto [m, diag] = benchmarks::isindy_identify(obs, lib, lambda, config.segments);
    for (std::size_t i = 0; i < diag.converged.size(); ++i)
      if (!diag.converged[i])
        std::cerr << "warning: solver: NoConvergence (column " << i + 1
                  << ": support still changing after " << diag.iterations[i] << " iterations)\n";
    model = std::move(m);
  } else {
    model = benchmarks::identify(method, obs, lib, lambda, config.segments);
  }
  if (seed_given) model->meta().seed = config.seeds.front();

  for (const auto& line : report::equation_lines(*model)) std::cout << line << '\n';
  const fs::path path = config.output_dir / "model.json";
  report::write_model(path, *model);
  print_path(path);
  return 0;
}

int cmd_benchmark(const runner::RunConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto result = runner::run_benchmark(config);
  const auto paths = runner::write_benchmark(result, config.output_dir);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  for (const auto& line : runner::support_summary(result)) std::cout << line << '\n';
  for (const auto& p : paths)
    if (p.extension() == ".csv") print_path(p);
  std::printf("%zu cells, %zu failed, %zu plots, %.2f s\n", result.cells.size(), result.failures(),
              static_cast<std::size_t>(std::count_if(paths.begin(), paths.end(),
                                                     [](const fs::path& p) { return p.extension() == ".svg"; })),
              seconds);
  return result.failures() > 0 ? kExitPartial : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sparse identification of ODE systems from noisy time series"};
  app.require_subcommand(1);
  app.fallthrough(false);

  Flags simulate_flags, smooth_flags, identify_flags, benchmark_flags;
  auto* simulate = app.add_subcommand("simulate", "integrate a benchmark system or a model; optionally add noise");
  auto* smooth = app.add_subcommand("smooth", "penalized spline smoothing of an observation CSV");
  auto* identify = app.add_subcommand("identify", "identify a sparse model from an observation CSV");
  auto* benchmark = app.add_subcommand("benchmark", "method x noise x seed sweep on a benchmark system");
  add_shared_flags(*simulate, simulate_flags);
  add_shared_flags(*smooth, smooth_flags);
  add_shared_flags(*identify, identify_flags);
  add_shared_flags(*benchmark, benchmark_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(build_config(simulate_flags));
    if (smooth->parsed()) return cmd_smooth(build_config(smooth_flags));
    if (identify->parsed())
      return cmd_identify(build_config(identify_flags),
                          identify_flags.given("seed") || identify_flags.given("seeds"));
    if (benchmark->parsed()) return cmd_benchmark(build_config(benchmark_flags));
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return is_input_error(e.code()) ? kExitInput : kExitPartial;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitPartial;
  }
  return kExitInput;
}
