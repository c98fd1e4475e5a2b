#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

RandomRouter::RandomRouter(RouterConfig config, std::size_t feature_dim, std::size_t num_models)
    : TrainedRouter(std::move(config), feature_dim, num_models) {
  if (num_models == 0) throw ValidationError("random routing needs at least one model");
}

Prediction RandomRouter::predict(const Eigen::MatrixXd& features) const {
  check_features(features);
  const auto k = static_cast<Eigen::Index>(num_models());
  return {Eigen::MatrixXd::Zero(features.rows(), k), Eigen::MatrixXd::Zero(features.rows(), k)};
}

RouterPolicy RandomRouter::route_prediction(const Prediction& prediction, double /*lambda*/,
                                            const Eligibility& eligible) const {
  const auto n = prediction.u_hat.rows();
  const auto k = prediction.u_hat.cols();
  RouterPolicy policy = RouterPolicy::Constant(n, k, 1.0 / static_cast<double>(k));
  if (eligible.size() == 0) return policy;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto count = eligible.row(i).count();
    if (count == 0) throw ValidationError("no eligible model for row " + std::to_string(i));
    for (Eigen::Index j = 0; j < k; ++j)
      policy(i, j) = eligible(i, j) ? 1.0 / static_cast<double>(count) : 0.0;
  }
  return policy;
}

std::unique_ptr<TrainedRouter> fit_random(const RouterConfig& config, std::size_t feature_dim,
                                          std::size_t num_models) {
  RouterConfig c = config;
  c.kind = RouterKind::random;
  return std::make_unique<RandomRouter>(c, feature_dim, num_models);
}

OracleRouter::OracleRouter(RouterConfig config, std::size_t feature_dim, Eigen::MatrixXd u,
                           Eigen::MatrixXd c)
    : TrainedRouter(std::move(config), feature_dim, static_cast<std::size_t>(u.cols())),
      u_(std::move(u)),
      c_(std::move(c)) {
  if (u_.rows() != c_.rows() || u_.cols() != c_.cols())
    throw ValidationError("oracle utility and cost blocks differ in shape");
}

Prediction OracleRouter::predict(const Eigen::MatrixXd& features) const {
  if (features.rows() != u_.rows())
    throw ValidationError("the oracle only routes the " + std::to_string(u_.rows()) +
                          " rows it was built on");
  // Missing cells are never eligible; any finite stand-in keeps the contract.
  return {u_.array().isNaN().select(0.0, u_), c_.array().isNaN().select(0.0, c_)};
}

RouterPolicy OracleRouter::route_prediction(const Prediction& prediction, double lambda,
                                            const Eligibility& eligible) const {
  // The cost-unaware oracle takes argmax u; true cost only breaks ties.
  return point_mass_policy(prediction, config().cost_aware ? lambda : 0.0, eligible);
}

std::unique_ptr<OracleRouter> fit_oracle(const RouterConfig& config, std::size_t feature_dim,
                                         const Eigen::MatrixXd& u, const Eigen::MatrixXd& c,
                                         bool acknowledged) {
  if (!acknowledged)
    throw ConfigError(
        "the oracle reads ground-truth outcomes and is analysis-only; pass --allow-oracle "
        "to include it");
  RouterConfig cfg = config;
  cfg.kind = RouterKind::oracle;
  return std::make_unique<OracleRouter>(cfg, feature_dim, u, c);
}

}  // namespace mmroute
