#include "isindy/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace isindy::report {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad_model(const std::string& detail) {
  throw Error(ErrorCode::ParseError, "cli_report", "model JSON: " + detail);
}

const json& field(const json& obj, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) bad_model(std::string("missing key '") + key + "'");
  return *it;
}

std::vector<double> number_array(const json& value, const char* what) {
  if (!value.is_array()) bad_model(std::string(what) + " must be an array");
  std::vector<double> out;
  for (const auto& v : value) {
    if (!v.is_number()) bad_model(std::string(what) + " must hold numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  return buf;
}

}  // namespace

std::string serialize_model(const SparseModel& model) {
  json doc;
  doc["d"] = model.d();
  doc["library"] = model.library().names();
  json xi = json::array();
  for (Index l = 0; l < model.m(); ++l) {
    json row = json::array();
    for (Index i = 0; i < model.d(); ++i) row.push_back(model.xi()(l, i));
    xi.push_back(std::move(row));
  }
  doc["xi"] = std::move(xi);
  doc["eta"] = std::vector<double>(model.eta().begin(), model.eta().end());
  doc["eta_assumed"] = model.eta_assumed();
  const auto& meta = model.meta();
  json m;
  m["method"] = meta.method;
  m["lambda"] = meta.lambda;
  m["rho_per_column"] = meta.rho_per_column;
  m["seed"] = meta.seed ? json(*meta.seed) : json(nullptr);
  doc["meta"] = std::move(m);
  return doc.dump(2) + "\n";
}

SparseModel parse_model(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    bad_model(e.what());
  }
  if (!doc.is_object()) bad_model("top level must be an object");

  const auto& d_value = field(doc, "d");
  if (!d_value.is_number_integer() || d_value.get<long long>() < 1) bad_model("d must be a positive integer");
  const Index d = d_value.get<Index>();

  const auto& names = field(doc, "library");
  if (!names.is_array() || names.empty()) bad_model("library must be a non-empty array");
  std::vector<features::FeatureDescriptor> descriptors;
  for (const auto& n : names) {
    if (!n.is_string()) bad_model("library entries must be strings");
    descriptors.push_back(features::parse_feature(n.get<std::string>(), d));
  }
  features::FeatureLibrary library(d, std::move(descriptors));

  const auto& rows = field(doc, "xi");
  if (!rows.is_array() || static_cast<Index>(rows.size()) != library.size())
    bad_model("xi needs one row per library feature");
  Eigen::MatrixXd xi(library.size(), d);
  for (Index l = 0; l < library.size(); ++l) {
    const auto row = number_array(rows[static_cast<std::size_t>(l)], "xi rows");
    if (static_cast<Index>(row.size()) != d) bad_model("xi rows need d entries");
    for (Index i = 0; i < d; ++i) xi(l, i) = row[static_cast<std::size_t>(i)];
  }

  const auto eta_values = number_array(field(doc, "eta"), "eta");
  if (static_cast<Index>(eta_values.size()) != d) bad_model("eta needs d entries");
  const Eigen::VectorXd eta = Eigen::Map<const Eigen::VectorXd>(eta_values.data(), d);

  const auto& assumed = field(doc, "eta_assumed");
  if (!assumed.is_boolean()) bad_model("eta_assumed must be a boolean");

  ModelMeta meta;
  const auto& m = field(doc, "meta");
  if (!m.is_object()) bad_model("meta must be an object");
  const auto& method = field(m, "method");
  if (!method.is_string()) bad_model("meta.method must be a string");
  meta.method = method.get<std::string>();
  meta.lambda = number_array(field(m, "lambda"), "meta.lambda");
  meta.rho_per_column = number_array(field(m, "rho_per_column"), "meta.rho_per_column");
  const auto& seed = field(m, "seed");
  if (seed.is_number_unsigned()) meta.seed = seed.get<std::uint64_t>();
  else if (!seed.is_null()) bad_model("meta.seed must be a non-negative integer or null");

  return SparseModel(std::move(library), std::move(xi), eta, assumed.get<bool>(), std::move(meta));
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ConfigError, "cli_report", "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::ConfigError, "cli_report", "write failed: " + path.string());
}

void write_model(const std::filesystem::path& path, const SparseModel& model) {
  write_text(path, serialize_model(model));
}

SparseModel read_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ConfigError, "cli_report", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string format_coefficient(double value, int decimals) {
  return value == 0.0 ? "0" : fixed(value, decimals);
}

std::vector<std::string> equation_lines(const SparseModel& model, int decimals) {
  std::vector<std::string> lines;
  const auto& lib = model.library();
  for (Index i = 0; i < model.d(); ++i) {
    std::string line = "dx" + std::to_string(i + 1) + "/dt =";
    const auto& support = model.support(i);
    if (support.empty()) line += " 0";
    bool first = true;
    for (Index l : support) {
      const double c = model.xi()(l, i);
      const std::string term = fixed(std::abs(c), decimals) + "*" + lib[l].name();
      if (first) line += (c < 0 ? " -" : " ") + term;
      else line += (c < 0 ? " - " : " + ") + term;
      first = false;
    }
    lines.push_back(std::move(line));
  }
  for (Index i = 0; i < model.d(); ++i) {
    std::string line = "x" + std::to_string(i + 1) + "(0) = " + fixed(model.eta()[i], decimals);
    if (model.eta_assumed()) line += " (first observation)";
    lines.push_back(std::move(line));
  }
  return lines;
}

double trajectory_rmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.size() == 0)
    throw Error(ErrorCode::DimensionMismatch, "cli_report", "trajectories differ in shape");
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

double attractor_diameter(const Eigen::MatrixXd& truth) {
  return (truth.colwise().maxCoeff() - truth.colwise().minCoeff()).norm();
}

std::optional<double> divergence_time(const StateMatrix& truth, const Eigen::MatrixXd& model,
                                      double fraction) {
  if (model.rows() != truth.n() || model.cols() != truth.d())
    throw Error(ErrorCode::DimensionMismatch, "cli_report", "trajectories differ in shape");
  const double limit = fraction * attractor_diameter(truth.values);
  for (Index k = 0; k < truth.n(); ++k)
    if ((model.row(k) - truth.values.row(k)).cwiseAbs().maxCoeff() > limit) return truth.grid.time(k);
  return std::nullopt;
}

std::string coefficient_table_csv(const std::vector<std::string>& feature_names, Index d,
                                  const std::vector<TableColumn>& columns) {
  std::ostringstream out;
  out << "component,term";
  for (const auto& c : columns) out << ',' << c.header;
  out << '\n';
  for (Index i = 0; i < d; ++i) {
    const std::string component = "x" + std::to_string(i + 1);
    out << component << ",eta";
    for (const auto& c : columns) {
      out << ',';
      if (!c.model) out << "FAIL(" << c.error << ')';
      else if (c.model->eta_assumed()) out << "---";
      else out << fixed(c.model->eta()[i], 4);
    }
    out << '\n';
    for (std::size_t l = 0; l < feature_names.size(); ++l) {
      out << component << ',' << feature_names[l];
      for (const auto& c : columns) {
        out << ',';
        if (!c.model) out << "FAIL(" << c.error << ')';
        else out << format_coefficient(c.model->xi()(static_cast<Index>(l), i));
      }
      out << '\n';
    }
  }
  return out.str();
}

namespace {

struct Panel {
  double x0, y0, width, height;
  double tmin, tmax, vmin, vmax;

  double px(double t) const { return x0 + (t - tmin) / (tmax - tmin) * width; }
  double py(double v) const { return y0 + height - (v - vmin) / (vmax - vmin) * height; }
};

std::string xml_escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

void polyline(std::ostringstream& svg, const Panel& p, const PlotSeries& s, Index col,
              const char* style) {
  svg << "<polyline fill=\"none\" " << style << " points=\"";
  for (Index k = 0; k < s.t.size(); ++k) {
    if (!std::isfinite(s.values(k, col))) continue;
    svg << coord(p.px(s.t[k])) << ',' << coord(p.py(s.values(k, col))) << ' ';
  }
  svg << "\"/>\n";
}

}  // namespace

std::string trajectory_svg(const std::string& title, const std::vector<std::string>& labels,
                           const PlotSeries& truth, const PlotSeries& identified,
                           const PlotSeries& observations) {
  const Index d = truth.values.cols();
  const double width = 720.0, panel_h = 200.0, margin = 50.0;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << margin + static_cast<double>(d) * (panel_h + margin) << "\">\n";
  svg << "<text x=\"" << margin << "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" << xml_escape(title)
      << "</text>\n";

  for (Index i = 0; i < d; ++i) {
    const auto finite_range = [&](const PlotSeries& s, double& lo, double& hi) {
      if (s.values.cols() <= i) return;
      for (Index k = 0; k < s.values.rows(); ++k) {
        const double v = s.values(k, i);
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
    };
    double lo = truth.values.col(i).minCoeff(), hi = truth.values.col(i).maxCoeff();
    finite_range(observations, lo, hi);
    // clamp a runaway identified trajectory so the truth stays readable
    double ilo = lo, ihi = hi;
    finite_range(identified, ilo, ihi);
    const double span = std::max(hi - lo, 1e-12);
    lo = std::max(ilo, lo - span);
    hi = std::min(ihi, hi + span);
    const double pad = 0.05 * std::max(hi - lo, 1e-12);
    Panel p{margin, margin + static_cast<double>(i) * (panel_h + margin), width - 2 * margin, panel_h,
            truth.t[0], truth.t[truth.t.size() - 1], lo - pad, hi + pad};

    svg << "<rect x=\"" << p.x0 << "\" y=\"" << p.y0 << "\" width=\"" << p.width << "\" height=\""
        << p.height << "\" fill=\"none\" stroke=\"#888\"/>\n";
    svg << "<text x=\"" << p.x0 + 4 << "\" y=\"" << p.y0 + 14
        << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << (static_cast<std::size_t>(i) < labels.size() ? xml_escape(labels[static_cast<std::size_t>(i)]) : "")
        << "</text>\n";
    svg << "<text x=\"" << p.x0 << "\" y=\"" << p.y0 + p.height + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\">t=" << coord(p.tmin) << "</text>\n";
    svg << "<text x=\"" << p.x0 + p.width - 50 << "\" y=\"" << p.y0 + p.height + 16
        << "\" font-family=\"sans-serif\" font-size=\"10\">t=" << coord(p.tmax) << "</text>\n";

    if (observations.values.cols() > i) {
      svg << "<g fill=\"green\">\n";
      for (Index k = 0; k < observations.t.size(); ++k) {
        const double v = observations.values(k, i);
        if (!std::isfinite(v) || v < p.vmin || v > p.vmax) continue;
        svg << "<circle cx=\"" << coord(p.px(observations.t[k])) << "\" cy=\"" << coord(p.py(v))
            << "\" r=\"1.2\"/>\n";
      }
      svg << "</g>\n";
    }
    polyline(svg, p, truth, i, "stroke=\"red\" stroke-width=\"1.5\"");
    if (identified.values.cols() > i) {
      PlotSeries clipped = identified;
      clipped.values.col(i) = clipped.values.col(i).cwiseMax(p.vmin).cwiseMin(p.vmax);
      polyline(svg, p, clipped, i, "stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"");
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace isindy::report
