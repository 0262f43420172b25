#pragma once

#include <Eigen/Dense>

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "isindy/core_types.hpp"

namespace isindy::features {

enum class FeatureKind { Monomial, Sine, Cosine };

/// One candidate term of the vector-field library: a monomial
/// x1^r1 ... xd^rd with total degree >= 1, or sin/cos(k * x_i) with k >= 1.
class FeatureDescriptor {
 public:
  static FeatureDescriptor monomial(std::vector<int> exponents);
  static FeatureDescriptor sine(Index d, Index variable, int multiple);
  static FeatureDescriptor cosine(Index d, Index variable, int multiple);

  FeatureKind kind() const noexcept { return kind_; }
  Index d() const noexcept { return static_cast<Index>(exponents_.size()); }
  const std::vector<int>& exponents() const noexcept { return exponents_; }
  Index variable() const noexcept { return variable_; }
  int multiple() const noexcept { return multiple_; }
  int total_degree() const;

  /// Canonical display name: "x1", "x1^2x2", "sin(2x1)", "cos(x3)".
  std::string name() const;

  double evaluate(std::span<const double> x) const;

  bool operator==(const FeatureDescriptor&) const = default;

 private:
  FeatureDescriptor(FeatureKind kind, std::vector<int> exponents, Index variable, int multiple);

  FeatureKind kind_;
  std::vector<int> exponents_;  // length d; all zero for trig terms
  Index variable_ = 0;          // zero based; trig only
  int multiple_ = 0;            // trig only
};

/// Inverse of FeatureDescriptor::name() for a d-dimensional state.
FeatureDescriptor parse_feature(std::string_view name, Index d);

/// Ordered, duplicate-free list of candidate features.
class FeatureLibrary {
 public:
  FeatureLibrary(Index d, std::vector<FeatureDescriptor> descriptors);

  Index d() const noexcept { return d_; }
  Index size() const noexcept { return static_cast<Index>(descriptors_.size()); }
  const std::vector<FeatureDescriptor>& descriptors() const noexcept { return descriptors_; }
  const FeatureDescriptor& operator[](Index i) const { return descriptors_[static_cast<std::size_t>(i)]; }
  std::vector<std::string> names() const;

  bool operator==(const FeatureLibrary&) const = default;

 private:
  Index d_;
  std::vector<FeatureDescriptor> descriptors_;
};

/// All monomials of total degree 1..degree, degree-major, and within a degree
/// in lexicographic order of the (sorted) variable index tuple:
/// x1, x2, x3, x1x1, x1x2, x1x3, x2x2, ...
FeatureLibrary polynomial_library(Index d, int degree);

/// sin(k x_i), cos(k x_i) for each variable i and k = 1..max_multiple.
FeatureLibrary trig_library(Index d, int max_multiple);

/// a followed by the members of b not already in a.
FeatureLibrary combine(const FeatureLibrary& a, const FeatureLibrary& b);

/// Builds a library from `poly:<degree>`, `trig:<max_multiple>` or a
/// `+`-joined combination of those.
FeatureLibrary parse_library_spec(std::string_view spec, Index d);

/// Theta(X): column l holds feature l applied to every row of states.
Eigen::MatrixXd evaluate(const FeatureLibrary& lib, const Eigen::MatrixXd& states);
Eigen::MatrixXd evaluate(const FeatureLibrary& lib, const StateMatrix& states);

/// Feature values at a single state vector.
void evaluate_row(const FeatureLibrary& lib, std::span<const double> x, std::span<double> out);

}  // namespace isindy::features
