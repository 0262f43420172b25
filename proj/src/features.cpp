#include "isindy/features.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>

namespace isindy::features {
namespace {

Error parse_error(std::string_view what, std::string_view text) {
  return Error(ErrorCode::ParseError, "features", std::string(what) + ": '" + std::string(text) + "'");
}

int parse_int(std::string_view text, std::string_view context) {
  int value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (text.empty() || ec != std::errc() || ptr != end) throw parse_error("expected an integer", context);
  return value;
}

// Parses "x<index>" at the front of text, returning the zero-based variable
// and the number of characters consumed.
std::pair<Index, std::size_t> parse_variable(std::string_view text, Index d, std::string_view full) {
  if (text.empty() || text[0] != 'x') throw parse_error("expected a variable", full);
  std::size_t i = 1;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
  const int index = parse_int(text.substr(1, i - 1), full);
  if (index < 1 || index > d) throw parse_error("variable index out of range", full);
  return {index - 1, i};
}

}  // namespace

FeatureDescriptor::FeatureDescriptor(FeatureKind kind, std::vector<int> exponents, Index variable,
                                     int multiple)
    : kind_(kind), exponents_(std::move(exponents)), variable_(variable), multiple_(multiple) {}

FeatureDescriptor FeatureDescriptor::monomial(std::vector<int> exponents) {
  if (exponents.empty())
    throw Error(ErrorCode::DimensionMismatch, "features", "monomial needs d >= 1");
  int total = 0;
  for (int e : exponents) {
    if (e < 0) throw Error(ErrorCode::ConfigError, "features", "negative exponent");
    total += e;
  }
  if (total < 1) throw Error(ErrorCode::ConfigError, "features", "constant feature is not allowed");
  return FeatureDescriptor(FeatureKind::Monomial, std::move(exponents), 0, 0);
}

FeatureDescriptor FeatureDescriptor::sine(Index d, Index variable, int multiple) {
  if (variable < 0 || variable >= d || multiple < 1)
    throw Error(ErrorCode::ConfigError, "features", "bad trig term");
  return FeatureDescriptor(FeatureKind::Sine, std::vector<int>(static_cast<std::size_t>(d), 0), variable, multiple);
}

FeatureDescriptor FeatureDescriptor::cosine(Index d, Index variable, int multiple) {
  if (variable < 0 || variable >= d || multiple < 1)
    throw Error(ErrorCode::ConfigError, "features", "bad trig term");
  return FeatureDescriptor(FeatureKind::Cosine, std::vector<int>(static_cast<std::size_t>(d), 0), variable, multiple);
}

int FeatureDescriptor::total_degree() const {
  int total = 0;
  for (int e : exponents_) total += e;
  return total;
}

std::string FeatureDescriptor::name() const {
  if (kind_ == FeatureKind::Monomial) {
    std::string out;
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      if (exponents_[i] == 0) continue;
      out += "x" + std::to_string(i + 1);
      if (exponents_[i] > 1) out += "^" + std::to_string(exponents_[i]);
    }
    return out;
  }
  std::string out = kind_ == FeatureKind::Sine ? "sin(" : "cos(";
  if (multiple_ > 1) out += std::to_string(multiple_);
  out += "x" + std::to_string(variable_ + 1) + ")";
  return out;
}

double FeatureDescriptor::evaluate(std::span<const double> x) const {
  switch (kind_) {
    case FeatureKind::Monomial: {
      double v = 1.0;
      for (std::size_t i = 0; i < exponents_.size(); ++i)
        for (int e = 0; e < exponents_[i]; ++e) v *= x[i];
      return v;
    }
    case FeatureKind::Sine:
      return std::sin(multiple_ * x[static_cast<std::size_t>(variable_)]);
    case FeatureKind::Cosine:
      return std::cos(multiple_ * x[static_cast<std::size_t>(variable_)]);
  }
  return 0.0;
}

FeatureDescriptor parse_feature(std::string_view name, Index d) {
  if (d < 1) throw Error(ErrorCode::DimensionMismatch, "features", "d must be >= 1");
  if (name.starts_with("sin(") || name.starts_with("cos(")) {
    if (!name.ends_with(")")) throw parse_error("unterminated trig term", name);
    std::string_view body = name.substr(4, name.size() - 5);
    const auto xpos = body.find('x');
    if (xpos == std::string_view::npos) throw parse_error("expected a variable", name);
    const int multiple = xpos == 0 ? 1 : parse_int(body.substr(0, xpos), name);
    auto [var, used] = parse_variable(body.substr(xpos), d, name);
    if (xpos + used != body.size()) throw parse_error("trailing characters", name);
    return name[0] == 's' ? FeatureDescriptor::sine(d, var, multiple)
                          : FeatureDescriptor::cosine(d, var, multiple);
  }
  std::vector<int> exponents(static_cast<std::size_t>(d), 0);
  std::string_view rest = name;
  if (rest.empty()) throw parse_error("empty feature name", name);
  while (!rest.empty()) {
    auto [var, used] = parse_variable(rest, d, name);
    rest.remove_prefix(used);
    int power = 1;
    if (!rest.empty() && rest[0] == '^') {
      std::size_t i = 1;
      while (i < rest.size() && std::isdigit(static_cast<unsigned char>(rest[i]))) ++i;
      power = parse_int(rest.substr(1, i - 1), name);
      rest.remove_prefix(i);
    }
    if (power < 1) throw parse_error("exponent must be positive", name);
    exponents[static_cast<std::size_t>(var)] += power;
  }
  return FeatureDescriptor::monomial(std::move(exponents));
}

FeatureLibrary::FeatureLibrary(Index d, std::vector<FeatureDescriptor> descriptors)
    : d_(d), descriptors_(std::move(descriptors)) {
  if (d < 1) throw Error(ErrorCode::DimensionMismatch, "features", "d must be >= 1");
  for (std::size_t i = 0; i < descriptors_.size(); ++i) {
    if (descriptors_[i].d() != d)
      throw Error(ErrorCode::DimensionMismatch, "features", "descriptor dimension differs from d");
    for (std::size_t j = 0; j < i; ++j)
      if (descriptors_[i] == descriptors_[j])
        throw Error(ErrorCode::ConfigError, "features", "duplicate feature " + descriptors_[i].name());
  }
}

std::vector<std::string> FeatureLibrary::names() const {
  std::vector<std::string> out;
  out.reserve(descriptors_.size());
  for (const auto& f : descriptors_) out.push_back(f.name());
  return out;
}

FeatureLibrary polynomial_library(Index d, int degree) {
  if (d < 1 || degree < 1)
    throw Error(ErrorCode::ConfigError, "features", "polynomial library needs d >= 1 and degree >= 1");
  std::vector<FeatureDescriptor> out;
  std::vector<Index> picks;
  // nondecreasing variable index tuples of a fixed length, in lexicographic order
  std::function<void(Index, int)> recurse = [&](Index start, int remaining) {
    if (remaining == 0) {
      std::vector<int> exponents(static_cast<std::size_t>(d), 0);
      for (Index v : picks) ++exponents[static_cast<std::size_t>(v)];
      out.push_back(FeatureDescriptor::monomial(std::move(exponents)));
      return;
    }
    for (Index v = start; v < d; ++v) {
      picks.push_back(v);
      recurse(v, remaining - 1);
      picks.pop_back();
    }
  };
  for (int k = 1; k <= degree; ++k) recurse(0, k);
  return FeatureLibrary(d, std::move(out));
}

FeatureLibrary trig_library(Index d, int max_multiple) {
  if (d < 1 || max_multiple < 1)
    throw Error(ErrorCode::ConfigError, "features", "trig library needs d >= 1 and max_multiple >= 1");
  std::vector<FeatureDescriptor> out;
  for (Index i = 0; i < d; ++i)
    for (int k = 1; k <= max_multiple; ++k) {
      out.push_back(FeatureDescriptor::sine(d, i, k));
      out.push_back(FeatureDescriptor::cosine(d, i, k));
    }
  return FeatureLibrary(d, std::move(out));
}

FeatureLibrary combine(const FeatureLibrary& a, const FeatureLibrary& b) {
  if (a.d() != b.d())
    throw Error(ErrorCode::DimensionMismatch, "features",
                "cannot combine d = " + std::to_string(a.d()) + " with d = " + std::to_string(b.d()));
  std::vector<FeatureDescriptor> out;
  for (const auto* lib : {&a, &b})
    for (const auto& f : lib->descriptors())
      if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  return FeatureLibrary(a.d(), std::move(out));
}

FeatureLibrary parse_library_spec(std::string_view spec, Index d) {
  std::optional<FeatureLibrary> lib;
  std::string_view rest = spec;
  if (rest.empty()) throw parse_error("empty library spec", spec);
  while (true) {
    const auto plus = rest.find('+');
    const std::string_view part = rest.substr(0, plus);
    const auto colon = part.find(':');
    if (colon == std::string_view::npos) throw parse_error("expected <kind>:<n>", spec);
    const std::string_view kind = part.substr(0, colon);
    const int value = parse_int(part.substr(colon + 1), spec);
    FeatureLibrary next = [&] {
      if (kind == "poly") return polynomial_library(d, value);
      if (kind == "trig") return trig_library(d, value);
      throw parse_error("unknown library kind", spec);
    }();
    lib = lib ? combine(*lib, next) : std::move(next);
    if (plus == std::string_view::npos) break;
    rest.remove_prefix(plus + 1);
  }
  return *lib;
}

Eigen::MatrixXd evaluate(const FeatureLibrary& lib, const Eigen::MatrixXd& states) {
  if (states.cols() != lib.d())
    throw Error(ErrorCode::DimensionMismatch, "features",
                "states have " + std::to_string(states.cols()) + " columns, library expects " +
                    std::to_string(lib.d()));
  const Index n = states.rows();
  Eigen::MatrixXd theta(n, lib.size());
  std::vector<double> row(static_cast<std::size_t>(lib.d()));
  for (Index k = 0; k < n; ++k) {
    for (Index i = 0; i < lib.d(); ++i) row[static_cast<std::size_t>(i)] = states(k, i);
    for (Index l = 0; l < lib.size(); ++l) theta(k, l) = lib[l].evaluate(row);
  }
  for (Index l = 0; l < lib.size(); ++l)
    if (!theta.col(l).allFinite())
      throw Error(ErrorCode::NonFinite, "features", "feature " + lib[l].name() + " overflowed");
  return theta;
}

Eigen::MatrixXd evaluate(const FeatureLibrary& lib, const StateMatrix& states) {
  return evaluate(lib, states.values);
}

void evaluate_row(const FeatureLibrary& lib, std::span<const double> x, std::span<double> out) {
  for (Index l = 0; l < lib.size(); ++l) out[static_cast<std::size_t>(l)] = lib[l].evaluate(x);
}

}  // namespace isindy::features
