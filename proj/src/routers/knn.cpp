#include <algorithm>
#include <cmath>
#include <numeric>

#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

KnnRouter::KnnRouter(RouterConfig config, Eigen::MatrixXd x, Eigen::MatrixXd u, Eigen::MatrixXd c)
    : TrainedRouter(std::move(config), static_cast<std::size_t>(x.cols()),
                    static_cast<std::size_t>(u.cols())),
      x_(std::move(x)),
      u_(std::move(u)),
      c_(std::move(c)) {
  if (u_.rows() != x_.rows() || c_.rows() != x_.rows() || c_.cols() != u_.cols())
    throw ValidationError("knn training blocks differ in shape");
  x_norms_ = x_.rowwise().norm();
  u_mean_ = nan_column_means(u_);
  c_mean_ = nan_column_means(c_);
}

std::vector<std::size_t> KnnRouter::neighbors(
    const Eigen::Ref<const Eigen::RowVectorXd>& query) const {
  const auto n = static_cast<std::size_t>(x_.rows());
  const std::size_t k = std::min(config().neighbors, n);
  const double q_norm = query.norm();
  const Eigen::VectorXd dots = x_ * query.transpose();
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double denom = x_norms_(static_cast<Eigen::Index>(i)) * q_norm;
    const double cos = denom > 0.0 ? dots(static_cast<Eigen::Index>(i)) / denom : 0.0;
    dist[i] = 1.0 - cos;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      return dist[a] != dist[b] ? dist[a] < dist[b] : a < b;
                    });
  order.resize(k);
  return order;
}

Prediction KnnRouter::predict(const Eigen::MatrixXd& features) const {
  check_features(features);
  const auto k_models = u_.cols();
  Prediction p{Eigen::MatrixXd(features.rows(), k_models),
               Eigen::MatrixXd(features.rows(), k_models)};
  std::size_t fallbacks = 0;
  for (Eigen::Index q = 0; q < features.rows(); ++q) {
    const auto nb = neighbors(features.row(q));
    for (Eigen::Index j = 0; j < k_models; ++j) {
      double su = 0.0, sc = 0.0;
      int nu = 0, nc = 0;
      for (auto r : nb) {
        const auto ri = static_cast<Eigen::Index>(r);
        if (!std::isnan(u_(ri, j))) {
          su += u_(ri, j);
          ++nu;
        }
        if (!std::isnan(c_(ri, j))) {
          sc += c_(ri, j);
          ++nc;
        }
      }
      if (nu > 0) {
        p.u_hat(q, j) = su / nu;
      } else {
        p.u_hat(q, j) = u_mean_(j);
        ++fallbacks;
      }
      p.c_hat(q, j) = nc > 0 ? sc / nc : c_mean_(j);
    }
  }
  last_fallbacks_ = fallbacks;
  return p;
}

std::unique_ptr<KnnRouter> fit_knn(const RouterConfig& config, const FitInput& data) {
  RouterConfig cfg = config;
  cfg.kind = RouterKind::knn;
  validate(cfg);
  if (static_cast<std::size_t>(data.x.rows()) < cfg.neighbors)
    throw ConfigError("knn asked for " + std::to_string(cfg.neighbors) +
                      " neighbors but has only " + std::to_string(data.x.rows()) +
                      " training rows");
  if (!data.x.allFinite()) throw ValidationError("knn features contain non-finite values");
  return std::make_unique<KnnRouter>(cfg, data.x, data.u, data.c);
}

}  // namespace mmroute
