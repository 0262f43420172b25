#include "isindy/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "isindy/csv.hpp"
#include "isindy/odeint.hpp"
#include "isindy/report.hpp"

namespace isindy::runner {
namespace {

[[noreturn]] void config_error(const std::string& detail) {
  throw Error(ErrorCode::ConfigError, "cli_report", detail);
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!text.empty() && text.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& token) {
  if (token.empty()) config_error(key + ": empty value");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(token.c_str(), &end);
  if (end != token.c_str() + token.size() || errno == ERANGE || !std::isfinite(v))
    config_error(key + ": '" + token + "' is not a finite number");
  return v;
}

long long parse_integer(const std::string& key, const std::string& token) {
  if (token.empty()) config_error(key + ": empty value");
  errno = 0;
  char* end = nullptr;
  const long long v = std::strtoll(token.c_str(), &end, 10);
  if (end != token.c_str() + token.size() || errno == ERANGE)
    config_error(key + ": '" + token + "' is not an integer");
  return v;
}

std::vector<double> parse_numbers(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& token : split(value, ',')) out.push_back(parse_double(key, token));
  if (out.empty()) config_error(key + ": needs at least one value");
  return out;
}

std::uint64_t parse_seed(const std::string& key, const std::string& token) {
  const long long v = parse_integer(key, token);
  if (v < 0) config_error(key + ": seeds must be non-negative");
  return static_cast<std::uint64_t>(v);
}

std::vector<std::uint64_t> parse_seeds(const std::string& key, const std::string& value) {
  constexpr std::uint64_t kMaxSeeds = 100000;
  std::vector<std::uint64_t> out;
  for (const auto& token : split(value, ',')) {
    const auto dots = token.find("..");
    if (dots == std::string::npos) {
      out.push_back(parse_seed(key, token));
      continue;
    }
    const auto lo = parse_seed(key, trim(token.substr(0, dots)));
    const auto hi = parse_seed(key, trim(token.substr(dots + 2)));
    if (hi < lo || hi - lo >= kMaxSeeds) config_error(key + ": bad seed range '" + token + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) config_error(key + ": needs at least one seed");
  return out;
}

std::vector<TimeWindow> parse_windows(const std::string& key, const std::string& value) {
  std::vector<TimeWindow> out;
  for (const auto& token : split(value, ',')) {
    const auto parts = split(token, ':');
    if (parts.size() != 2) config_error(key + ": expected start:end, got '" + token + "'");
    const TimeWindow w{parse_double(key, parts[0]), parse_double(key, parts[1])};
    if (!(w.end > w.start)) config_error(key + ": window '" + token + "' must have end > start");
    out.push_back(w);
  }
  if (out.empty()) config_error(key + ": needs at least one window");
  return out;
}

std::vector<Eigen::VectorXd> parse_ics(const std::string& key, const std::string& value) {
  std::vector<Eigen::VectorXd> out;
  for (const auto& vec : split(value, ';')) {
    const auto numbers = parse_numbers(key, vec);
    out.push_back(Eigen::Map<const Eigen::VectorXd>(numbers.data(), static_cast<Index>(numbers.size())));
  }
  if (out.empty()) config_error(key + ": needs at least one initial condition");
  return out;
}

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string join_ic(const Eigen::VectorXd& ic, char sep) {
  std::string out;
  for (Index i = 0; i < ic.size(); ++i) {
    if (i) out += sep;
    out += number(ic[i]);
  }
  return out;
}

std::string percent(double nvr) { return number(nvr * 100.0) + "%"; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string slug(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '+') out += c;
    else if (c == ',' || c == '_') out += '_';
  }
  return out;
}

std::string opt_number(const std::optional<double>& v) {
  return v ? csv::format_double(*v) : "";
}

}  // namespace

void RunConfig::validate() const {
  if (nvr.empty()) config_error("nvr: needs at least one value");
  for (double v : nvr)
    if (!(v >= 0.0 && v < 10.0)) config_error("nvr: values must lie in [0, 10)");
  for (double l : lambda)
    if (!(l >= 0.0)) config_error("lambda: values must be >= 0");
  if (seeds.empty()) config_error("seeds: needs at least one seed");
  if (segments < 0) config_error("segments: must be >= 0");
  if (step && !(*step > 0.0)) config_error("step: must be > 0");
  if (jobs < 1) config_error("jobs: must be >= 1");
  for (const auto& w : windows)
    if (!(w.end > w.start)) config_error("time-range: windows need end > start");
  for (std::size_t i = 1; i < ics.size(); ++i)
    if (ics[i].size() != ics[0].size()) config_error("ic: initial conditions differ in length");
}

const std::vector<std::string>& option_keys() {
  static const std::vector<std::string> keys{"system", "input",  "model",      "output-dir", "library",
                                             "lambda", "nvr",    "seeds",      "seed",       "segments",
                                             "method", "time-range", "ic",     "step",       "jobs"};
  return keys;
}

void apply_option(RunConfig& config, const std::string& key, const std::string& raw) {
  const std::string value = trim(raw);
  if (key == "system") {
    config.system = value;
  } else if (key == "input") {
    config.input = value;
  } else if (key == "model") {
    config.model = value;
  } else if (key == "output-dir") {
    if (value.empty()) config_error("output-dir: empty path");
    config.output_dir = value;
  } else if (key == "library") {
    config.libraries = split(value, ',');
    for (const auto& l : config.libraries)
      if (l.empty()) config_error("library: empty library spec");
  } else if (key == "lambda") {
    config.lambda = parse_numbers(key, value);
  } else if (key == "nvr") {
    config.nvr = parse_numbers(key, value);
  } else if (key == "seeds") {
    config.seeds = parse_seeds(key, value);
  } else if (key == "seed") {
    config.seeds = {parse_seed(key, value)};
  } else if (key == "segments") {
    const auto s = parse_integer(key, value);
    if (s < 0) config_error("segments: must be >= 0");
    config.segments = static_cast<Index>(s);
  } else if (key == "method") {
    config.methods.clear();
    for (const auto& m : split(value, ',')) config.methods.push_back(benchmarks::parse_method(m));
    if (config.methods.empty()) config_error("method: needs at least one method");
  } else if (key == "time-range") {
    config.windows = parse_windows(key, value);
  } else if (key == "ic") {
    config.ics = parse_ics(key, value);
  } else if (key == "step") {
    config.step = parse_double(key, value);
  } else if (key == "jobs") {
    const auto j = parse_integer(key, value);
    if (j < 1 || j > 1024) config_error("jobs: must lie in 1..1024");
    config.jobs = static_cast<int>(j);
  } else {
    config_error("unknown option '" + key + "'");
  }
  config.validate();
}

void apply_config_text(RunConfig& config, const std::string& text) {
  using json = nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::ParseError, "cli_report", std::string("config: ") + e.what());
  }
  if (!doc.is_object()) config_error("config: top level must be an object");

  const auto scalar = [](const std::string& key, const json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) return csv::format_double(v.get<double>());
    config_error("config: '" + key + "' has an unsupported value type");
  };
  for (const auto& [key, v] : doc.items()) {
    const auto& keys = option_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end())
      config_error("config: unknown key '" + key + "'");
    std::string value;
    if (v.is_array()) {
      const bool nested = !v.empty() && v.front().is_array();
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) value += nested ? ";" : ",";
        if (nested) {
          for (std::size_t j = 0; j < v[i].size(); ++j) value += (j ? "," : "") + scalar(key, v[i][j]);
        } else {
          value += scalar(key, v[i]);
        }
      }
    } else {
      value = scalar(key, v);
    }
    apply_option(config, key, value);
  }
}

void apply_config_file(RunConfig& config, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) config_error("cannot open config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  apply_config_text(config, buf.str());
}

std::size_t BenchmarkReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(cells.begin(), cells.end(), [](const CellResult& c) { return !c.model; }));
}

namespace {

void run_cell(const benchmarks::BenchmarkSystem& base, Index segments, const std::vector<double>& lambda,
              CellResult& c) {
  try {
    auto system = base;
    system.eta = c.ic;
    const StateMatrix truth = benchmarks::simulate_truth(system, c.window.start, c.window.end);
    const ObservationSet obs = benchmarks::add_noise(truth, {c.nvr, c.seed});
    const auto lib = features::parse_library_spec(c.library, system.d());
    SparseModel model = benchmarks::identify(c.method, obs, lib, lambda, segments);
    model.meta().seed = c.seed;

    // scoring is only meaningful when the library can express the truth
    const Eigen::MatrixXd true_xi = system.true_xi(lib);
    bool representable = true;
    for (const auto& term : system.true_terms) {
      const auto f = features::parse_feature(std::get<0>(term), system.d());
      if (std::find(lib.descriptors().begin(), lib.descriptors().end(), f) == lib.descriptors().end())
        representable = false;
    }
    if (representable) {
      c.support_correct = benchmarks::support_matches(model, true_xi);
      c.max_coefficient_error = benchmarks::max_coefficient_error(model, true_xi);
    }

    try {
      const auto simulated = odeint::simulate_model(model, truth.grid);
      c.rmse = report::trajectory_rmse(simulated.values, truth.values);
      c.divergence_time = report::divergence_time(truth, simulated.values);
      if (c.seed_index == 0) c.identified = simulated.values;
    } catch (const Error& e) {
      c.simulation_error = e.what();
    }
    if (c.seed_index == 0) {
      c.truth = truth;
      c.observations = obs;
    }
    c.model = std::move(model);
  } catch (const Error& e) {
    c.error_code = std::string(to_string(e.code()));
    c.error = e.what();
  } catch (const std::exception& e) {
    c.error_code = "Exception";
    c.error = e.what();
  }
}

}  // namespace

BenchmarkReport run_benchmark(const RunConfig& config) {
  config.validate();
  if (config.system.empty()) config_error("benchmark needs --system");
  BenchmarkReport report{benchmarks::benchmark_system(config.system), {}, {}, {}, {}, {}, {}, {}};
  auto& sys = report.system;
  if (config.step) sys.h = *config.step;
  const Index d = sys.d();

  report.methods = config.methods.empty()
                       ? std::vector{benchmarks::Method::Sindy, benchmarks::Method::Insindy,
                                     benchmarks::Method::Isindy}
                       : config.methods;
  report.nvr = config.nvr;
  report.seeds = config.seeds;
  report.windows = config.windows.empty() ? std::vector{TimeWindow{sys.t_start, sys.t_end}} : config.windows;
  report.libraries = config.libraries.empty() ? std::vector{sys.library_spec} : config.libraries;
  report.ics = config.ics.empty() ? std::vector{sys.eta} : config.ics;
  const std::vector<double> lambda = config.lambda.empty() ? std::vector{sys.lambda} : config.lambda;
  const Index segments = config.segments > 0 ? config.segments : sys.num_segments;

  // reject bad settings before any cell runs
  for (const auto& w : report.windows)
    if (w.start < sys.t_start) config_error("time-range: windows must start at or after " + number(sys.t_start));
  for (const auto& ic : report.ics)
    if (ic.size() != d) config_error("ic: system '" + sys.name + "' needs " + std::to_string(d) + " components");
  for (const auto& l : report.libraries) features::parse_library_spec(l, d);
  if (lambda.size() != 1 && static_cast<Index>(lambda.size()) != d)
    config_error("lambda: needs 1 or " + std::to_string(d) + " values");

  for (std::size_t wi = 0; wi < report.windows.size(); ++wi)
    for (std::size_t li = 0; li < report.libraries.size(); ++li)
      for (std::size_t ii = 0; ii < report.ics.size(); ++ii)
        for (std::size_t mi = 0; mi < report.methods.size(); ++mi)
          for (std::size_t ni = 0; ni < report.nvr.size(); ++ni)
            for (std::size_t si = 0; si < report.seeds.size(); ++si) {
              CellResult c{};
              c.method = report.methods[mi];
              c.nvr = report.nvr[ni];
              c.seed = report.seeds[si];
              c.window = report.windows[wi];
              c.library = report.libraries[li];
              c.ic = report.ics[ii];
              c.method_index = mi;
              c.nvr_index = ni;
              c.seed_index = si;
              c.window_index = wi;
              c.library_index = li;
              c.ic_index = ii;
              report.cells.push_back(std::move(c));
            }

  // cells write only to their own slot, so the result order is fixed
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < report.cells.size(); i = next++)
      run_cell(sys, segments, lambda, report.cells[i]);
  };
  const auto jobs = std::min<std::size_t>(static_cast<std::size_t>(config.jobs), report.cells.size());
  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return report;
}

namespace {

std::string group_suffix(const BenchmarkReport& r, const CellResult& c) {
  std::string s;
  if (r.windows.size() > 1) s += "_t" + number(c.window.start) + "-" + number(c.window.end);
  if (r.libraries.size() > 1) s += "_" + slug(c.library);
  if (r.ics.size() > 1) s += "_ic" + slug(join_ic(c.ic, '_'));
  return s;
}

std::string ic_header(const Eigen::VectorXd& ic) { return "ic=" + join_ic(ic, '/'); }

bool same_group(const CellResult& a, const CellResult& b) {
  return a.window_index == b.window_index && a.library_index == b.library_index && a.ic_index == b.ic_index;
}

}  // namespace

std::vector<std::string> support_summary(const BenchmarkReport& r) {
  std::vector<std::string> lines;
  const std::size_t seeds = r.seeds.size();
  for (std::size_t i = 0; i < r.cells.size(); i += seeds) {
    const auto& first = r.cells[i];
    std::size_t failed = 0, correct = 0;
    bool scored = false;
    for (std::size_t s = 0; s < seeds; ++s) {
      const auto& c = r.cells[i + s];
      if (!c.model) ++failed;
      if (c.support_correct) {
        scored = true;
        if (*c.support_correct) ++correct;
      }
    }
    std::string line = benchmarks::to_string(first.method) + " nvr=" + percent(first.nvr);
    if (r.windows.size() > 1) line += " t=[" + number(first.window.start) + "," + number(first.window.end) + "]";
    if (r.libraries.size() > 1) line += " library=" + first.library;
    if (r.ics.size() > 1) line += " " + ic_header(first.ic);
    line += ": support ";
    line += scored ? std::to_string(correct) + "/" + std::to_string(seeds) : "n/a";
    if (failed) line += ", " + std::to_string(failed) + " failed";
    lines.push_back(std::move(line));
  }
  return lines;
}

std::vector<std::filesystem::path> write_benchmark(const BenchmarkReport& r,
                                                   const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  const auto emit = [&](const std::filesystem::path& path, const std::string& text) {
    report::write_text(path, text);
    written.push_back(path);
  };
  const Index d = r.system.d();
  const std::size_t seeds = r.seeds.size();

  // coefficient tables: one per (window, library, ic), first seed's realization
  for (std::size_t g = 0; g < r.cells.size();) {
    std::size_t end = g;
    while (end < r.cells.size() && same_group(r.cells[g], r.cells[end])) ++end;
    std::vector<report::TableColumn> columns;
    for (std::size_t i = g; i < end; i += seeds) {
      const auto& c = r.cells[i];
      columns.push_back({benchmarks::to_string(c.method) + " nvr=" + percent(c.nvr), c.model, c.error_code});
    }
    const auto lib = features::parse_library_spec(r.cells[g].library, d);
    emit(dir / ("table" + group_suffix(r, r.cells[g]) + ".csv"),
         report::coefficient_table_csv(lib.names(), d, columns));
    g = end;
  }

  // long format: one row per cell, and one row per coefficient
  {
    std::ostringstream cells, coefs;
    const std::string keys = "method,nvr,seed,window_start,window_end,library,ic";
    cells << keys
          << ",status,error,support_correct,max_coefficient_error,rmse,divergence_time,simulation_error\n";
    coefs << keys << ",component,term,value,estimated\n";
    for (const auto& c : r.cells) {
      const std::string key = benchmarks::to_string(c.method) + "," + csv::format_double(c.nvr) + "," +
                              std::to_string(c.seed) + "," + csv::format_double(c.window.start) + "," +
                              csv::format_double(c.window.end) + "," + csv_field(c.library) + "," +
                              csv_field(join_ic(c.ic, ' '));
      cells << key << ',' << (c.model ? "ok" : "FAIL") << ',' << csv_field(c.error) << ','
            << (c.support_correct ? (*c.support_correct ? "true" : "false") : "") << ','
            << opt_number(c.max_coefficient_error) << ',' << opt_number(c.rmse) << ','
            << opt_number(c.divergence_time) << ',' << csv_field(c.simulation_error) << '\n';
      if (!c.model) continue;
      const auto& m = *c.model;
      for (Index i = 0; i < d; ++i) {
        const std::string comp = "x" + std::to_string(i + 1);
        coefs << key << ',' << comp << ",eta," << csv::format_double(m.eta()[i]) << ','
              << (m.eta_assumed() ? "false" : "true") << '\n';
        for (Index l = 0; l < m.m(); ++l)
          coefs << key << ',' << comp << ',' << m.library()[l].name() << ','
                << csv::format_double(m.xi()(l, i)) << ",true\n";
      }
    }
    emit(dir / "cells.csv", cells.str());
    emit(dir / "coefficients.csv", coefs.str());
  }

  // support recovery across seeds
  {
    std::ostringstream out;
    out << "method,nvr,window_start,window_end,library,ic,replicates,failed,support_correct\n";
    for (std::size_t i = 0; i < r.cells.size(); i += seeds) {
      const auto& first = r.cells[i];
      std::size_t failed = 0, correct = 0;
      bool scored = false;
      for (std::size_t s = 0; s < seeds; ++s) {
        const auto& c = r.cells[i + s];
        if (!c.model) ++failed;
        if (c.support_correct) {
          scored = true;
          if (*c.support_correct) ++correct;
        }
      }
      out << benchmarks::to_string(first.method) << ',' << csv::format_double(first.nvr) << ','
          << csv::format_double(first.window.start) << ',' << csv::format_double(first.window.end) << ','
          << csv_field(first.library) << ',' << csv_field(join_ic(first.ic, ' ')) << ',' << seeds << ','
          << failed << ',' << (scored ? std::to_string(correct) : "") << '\n';
    }
    emit(dir / "support_recovery.csv", out.str());
  }

  // library x initial-condition sweep: ISINDy (or the first method), first nvr/seed/window
  if (r.libraries.size() > 1 || r.ics.size() > 1) {
    const auto it = std::find(r.methods.begin(), r.methods.end(), benchmarks::Method::Isindy);
    const std::size_t mi = it != r.methods.end() ? static_cast<std::size_t>(it - r.methods.begin()) : 0;
    std::ostringstream out;
    out << "library,component,term";
    for (const auto& ic : r.ics) out << ',' << csv_field(ic_header(ic));
    out << '\n';
    for (std::size_t li = 0; li < r.libraries.size(); ++li) {
      std::vector<const CellResult*> row_cells;
      for (const auto& c : r.cells)
        if (c.window_index == 0 && c.library_index == li && c.method_index == mi && c.nvr_index == 0 &&
            c.seed_index == 0)
          row_cells.push_back(&c);
      const auto lib = features::parse_library_spec(r.libraries[li], d);
      for (Index i = 0; i < d; ++i) {
        const std::string comp = "x" + std::to_string(i + 1);
        for (Index l = -1; l < lib.size(); ++l) {
          out << csv_field(r.libraries[li]) << ',' << comp << ',' << (l < 0 ? "eta" : lib[l].name());
          for (const auto* c : row_cells) {
            out << ',';
            if (!c->model) out << "FAIL(" << c->error_code << ')';
            else if (l < 0) out << (c->model->eta_assumed() ? "---" : report::format_coefficient(c->model->eta()[i]));
            else out << report::format_coefficient(c->model->xi()(l, i));
          }
          out << '\n';
        }
      }
    }
    emit(dir / "table_sweep.csv", out.str());
  }

  // plots for the first seed of every configuration
  for (const auto& c : r.cells) {
    if (c.seed_index != 0 || !c.truth) continue;
    const Eigen::VectorXd t = c.truth->grid.times();
    report::PlotSeries truth{t, c.truth->values};
    report::PlotSeries identified{t, c.identified ? *c.identified : Eigen::MatrixXd()};
    report::PlotSeries obs{t, c.nvr > 0.0 ? c.observations->values : Eigen::MatrixXd()};
    std::string title = r.system.name + " " + benchmarks::to_string(c.method) + " nvr=" + percent(c.nvr);
    if (!c.simulation_error.empty()) title += " (identified model: " + c.simulation_error + ")";
    const std::string name = benchmarks::to_string(c.method) + "_nvr" + number(c.nvr * 100.0) +
                             group_suffix(r, c) + ".svg";
    emit(dir / "plots" / name,
         report::trajectory_svg(title, c.observations->labels, truth, identified, obs));
  }
  return written;
}

}  // namespace isindy::runner
