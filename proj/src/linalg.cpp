#include "mmroute/linalg.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "mmroute/error.hpp"

namespace mmroute {

Eigen::MatrixXd RidgeFit::predict(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out = x * weights;
  out.rowwise() += intercept;
  return out;
}

namespace {

// Ridge solution on the given rows for a block of outputs sharing them.
void solve_block(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y,
                 const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols,
                 double penalty, RidgeFit& fit) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto p = x.cols();
  Eigen::MatrixXd xs(n, p);
  Eigen::MatrixXd ys(n, static_cast<Eigen::Index>(cols.size()));
  for (Eigen::Index r = 0; r < n; ++r) {
    xs.row(r) = x.row(rows[static_cast<std::size_t>(r)]);
    for (std::size_t c = 0; c < cols.size(); ++c)
      ys(r, static_cast<Eigen::Index>(c)) = y(rows[static_cast<std::size_t>(r)], cols[c]);
  }
  const Eigen::RowVectorXd x_mean = xs.colwise().mean();
  const Eigen::RowVectorXd y_mean = ys.colwise().mean();
  xs.rowwise() -= x_mean;
  ys.rowwise() -= y_mean;

  Eigen::MatrixXd w;
  if (penalty > 0.0) {
    Eigen::MatrixXd gram = xs.transpose() * xs;
    gram.diagonal().array() += penalty;
    w = gram.ldlt().solve(xs.transpose() * ys);
  } else {
    // Minimum-norm least squares; stays defined for rank-deficient designs.
    w = xs.completeOrthogonalDecomposition().solve(ys);
  }
  for (std::size_t c = 0; c < cols.size(); ++c) {
    fit.weights.col(cols[c]) = w.col(static_cast<Eigen::Index>(c));
    fit.intercept(cols[c]) = y_mean(static_cast<Eigen::Index>(c)) -
                             x_mean.dot(w.col(static_cast<Eigen::Index>(c)));
  }
}

}  // namespace

RidgeFit fit_ridge(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y, double penalty) {
  if (x.rows() < 1) throw ValidationError("regression needs at least one training row");
  if (y.rows() != x.rows()) throw ValidationError("regression targets and features differ in rows");
  if (!(penalty >= 0.0)) throw ConfigError("ridge penalty must be nonnegative");
  if (!x.allFinite()) throw ValidationError("regression features contain non-finite values");

  RidgeFit fit;
  fit.weights = Eigen::MatrixXd::Zero(x.cols(), y.cols());
  fit.intercept = Eigen::RowVectorXd::Zero(y.cols());

  // Outputs with the same observed-row pattern share one factorization.
  std::map<std::vector<bool>, std::vector<Eigen::Index>> groups;
  for (Eigen::Index c = 0; c < y.cols(); ++c) {
    std::vector<bool> mask(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index r = 0; r < y.rows(); ++r) mask[static_cast<std::size_t>(r)] = !std::isnan(y(r, c));
    groups[mask].push_back(c);
  }
  for (const auto& [mask, cols] : groups) {
    std::vector<Eigen::Index> rows;
    for (std::size_t r = 0; r < mask.size(); ++r)
      if (mask[r]) rows.push_back(static_cast<Eigen::Index>(r));
    if (rows.empty()) {
      for (auto c : cols) fit.unobserved_outputs.push_back(static_cast<std::size_t>(c));
      continue;
    }
    solve_block(x, y, rows, cols, penalty, fit);
  }
  return fit;
}

TruncatedSvd truncated_svd(const Eigen::MatrixXd& x, std::size_t rank,
                           std::vector<std::string>* warnings) {
  if (rank == 0) throw ConfigError("truncated SVD rank must be positive");
  const auto d = static_cast<std::size_t>(x.cols());
  const auto n = static_cast<std::size_t>(x.rows());
  if (rank > std::min(n, d))
    throw ConfigError("truncated SVD rank " + std::to_string(rank) + " exceeds min(n, d) = " +
                      std::to_string(std::min(n, d)));

  const Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  if (eig.info() != Eigen::Success) throw RuntimeError("eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = eig.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = eig.eigenvectors().rowwise().reverse();

  const double top = std::max(values(0), 0.0);
  const double tol = top * static_cast<double>(std::max(n, d)) *
                     std::numeric_limits<double>::epsilon() * 1e2;
  std::size_t numerical_rank = 0;
  for (Eigen::Index i = 0; i < values.size(); ++i)
    if (values(i) > tol) ++numerical_rank;
  numerical_rank = std::max<std::size_t>(numerical_rank, 1);

  std::size_t r = rank;
  if (numerical_rank < rank) {
    if (warnings)
      warnings->push_back("requested rank " + std::to_string(rank) +
                          " exceeds numerical rank " + std::to_string(numerical_rank) +
                          "; using " + std::to_string(numerical_rank));
    r = numerical_rank;
  }
  TruncatedSvd out;
  out.requested_rank = rank;
  out.components = vectors.leftCols(static_cast<Eigen::Index>(r));
  out.singular_values = values.head(static_cast<Eigen::Index>(r)).cwiseMax(0.0).cwiseSqrt();
  return out;
}

Eigen::RowVectorXd nan_column_means(const Eigen::MatrixXd& m, double fallback) {
  Eigen::RowVectorXd out(m.cols());
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      if (std::isnan(m(r, c))) continue;
      sum += m(r, c);
      ++count;
    }
    out(c) = count ? sum / static_cast<double>(count) : fallback;
  }
  return out;
}

}  // namespace mmroute
