#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace mmroute {

/// Multi-output ridge regression with an unpenalized intercept:
///   min ||y - X w - b||^2 + penalty * ||w||^2, solved per output on that
/// output's observed (non-NaN) rows.
struct RidgeFit {
  Eigen::MatrixXd weights;      // p x K
  Eigen::RowVectorXd intercept;  // 1 x K
  std::vector<std::size_t> unobserved_outputs;  // columns with no target rows

  Eigen::MatrixXd predict(const Eigen::MatrixXd& x) const;
};

RidgeFit fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double penalty);

/// Top-r right singular subspace of a feature matrix (no centering), from
/// the eigendecomposition of the d x d Gram matrix.
struct TruncatedSvd {
  Eigen::MatrixXd components;       // d x r, orthonormal columns
  Eigen::VectorXd singular_values;  // r, descending
  std::size_t requested_rank = 0;

  Eigen::MatrixXd transform(const Eigen::MatrixXd& x) const { return x * components; }
};

// Reduces the rank to the numerical rank of `x` when fewer than `rank`
// singular values are significant; a message goes into `warnings`.
TruncatedSvd truncated_svd(const Eigen::MatrixXd& x, std::size_t rank,
                           std::vector<std::string>* warnings = nullptr);

// NaN-aware column means; columns without observations map to `fallback`.
Eigen::RowVectorXd nan_column_means(const Eigen::MatrixXd& m, double fallback = 0.0);

}  // namespace mmroute
