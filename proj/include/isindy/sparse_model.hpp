#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isindy/features.hpp"

namespace isindy {

/// Provenance carried alongside an identified model.
struct ModelMeta {
  std::string method;
  std::vector<double> lambda;
  std::vector<double> rho_per_column;
  std::optional<std::uint64_t> seed;

  bool operator==(const ModelMeta&) const = default;
};

/// An identified ODE system dx/dt = Theta(x) Xi with x(t1) = eta.
class SparseModel {
 public:
  SparseModel(features::FeatureLibrary library, Eigen::MatrixXd xi, Eigen::VectorXd eta,
              bool eta_assumed = false, ModelMeta meta = {});

  const features::FeatureLibrary& library() const noexcept { return library_; }
  const Eigen::MatrixXd& xi() const noexcept { return xi_; }
  const Eigen::VectorXd& eta() const noexcept { return eta_; }
  /// Row indices of the nonzero coefficients of column i.
  const std::vector<Index>& support(Index i) const { return support_[static_cast<std::size_t>(i)]; }
  Index d() const noexcept { return library_.d(); }
  Index m() const noexcept { return library_.size(); }

  /// True when eta was taken from the first observation instead of estimated.
  bool eta_assumed() const noexcept { return eta_assumed_; }
  const ModelMeta& meta() const noexcept { return meta_; }
  ModelMeta& meta() noexcept { return meta_; }

  /// Theta(x) Xi at one state, skipping zero coefficients.
  Eigen::VectorXd vector_field(const Eigen::VectorXd& x) const;

 private:
  features::FeatureLibrary library_;
  Eigen::MatrixXd xi_;
  Eigen::VectorXd eta_;
  std::vector<std::vector<Index>> support_;
  bool eta_assumed_;
  ModelMeta meta_;
};

}  // namespace isindy
