#include "isindy/sparse_model.hpp"

namespace isindy {

SparseModel::SparseModel(features::FeatureLibrary library, Eigen::MatrixXd xi, Eigen::VectorXd eta,
                         bool eta_assumed, ModelMeta meta)
    : library_(std::move(library)),
      xi_(std::move(xi)),
      eta_(std::move(eta)),
      eta_assumed_(eta_assumed),
      meta_(std::move(meta)) {
  if (xi_.rows() != library_.size() || xi_.cols() != library_.d() || eta_.size() != library_.d())
    throw Error(ErrorCode::DimensionMismatch, "core_types",
                "xi must be m x d and eta length d for the given library");
  if (!eta_.allFinite()) throw Error(ErrorCode::NonFinite, "core_types", "eta is not finite");
  if (!xi_.allFinite()) throw Error(ErrorCode::NonFinite, "core_types", "xi is not finite");
  support_.resize(static_cast<std::size_t>(xi_.cols()));
  for (Index i = 0; i < xi_.cols(); ++i)
    for (Index l = 0; l < xi_.rows(); ++l)
      if (xi_(l, i) != 0.0) support_[static_cast<std::size_t>(i)].push_back(l);
}

Eigen::VectorXd SparseModel::vector_field(const Eigen::VectorXd& x) const {
  const std::span<const double> state(x.data(), static_cast<std::size_t>(x.size()));
  Eigen::VectorXd dx = Eigen::VectorXd::Zero(d());
  for (Index i = 0; i < d(); ++i) {
    double sum = 0.0;
    for (Index l : support(i)) sum += xi_(l, i) * library_[l].evaluate(state);
    dx[i] = sum;
  }
  return dx;
}

}  // namespace isindy
