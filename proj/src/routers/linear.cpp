#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

namespace {

// Outputs without any training target predict the column fallback (0).
void note_unobserved(TrainedRouter& router, const RidgeFit& fit, const char* what) {
  for (auto j : fit.unobserved_outputs)
    router.note(std::string("model ") + std::to_string(j) + " has no observed " + what +
                " targets; predicting 0");
}

void check_fit_input(const FitInput& data) {
  if (data.x.rows() < 1) throw ValidationError("regression needs at least one training row");
  if (data.u.rows() != data.x.rows() || data.c.rows() != data.x.rows())
    throw ValidationError("features and outcome rows differ in count");
}

}  // namespace

LinearRouter::LinearRouter(RouterConfig config, std::size_t feature_dim, RidgeFit u_fit,
                           RidgeFit c_fit)
    : TrainedRouter(std::move(config), feature_dim, static_cast<std::size_t>(u_fit.weights.cols())),
      u_fit_(std::move(u_fit)),
      c_fit_(std::move(c_fit)) {}

Prediction LinearRouter::predict(const Eigen::MatrixXd& features) const {
  check_features(features);
  return {u_fit_.predict(features), c_fit_.predict(features)};
}

std::unique_ptr<LinearRouter> fit_linear(const RouterConfig& config, const FitInput& data) {
  RouterConfig cfg = config;
  cfg.kind = RouterKind::linear;
  validate(cfg);
  check_fit_input(data);
  auto router = std::make_unique<LinearRouter>(cfg, static_cast<std::size_t>(data.x.cols()),
                                               fit_ridge(data.x, data.u, kLinearRidge),
                                               fit_ridge(data.x, data.c, kLinearRidge));
  note_unobserved(*router, router->utility_fit(), "utility");
  note_unobserved(*router, router->cost_fit(), "cost");
  return router;
}

LinearMfRouter::LinearMfRouter(RouterConfig config, TruncatedSvd svd, RidgeFit u_fit,
                               RidgeFit c_fit)
    : TrainedRouter(std::move(config), static_cast<std::size_t>(svd.components.rows()),
                    static_cast<std::size_t>(u_fit.weights.cols())),
      svd_(std::move(svd)),
      u_fit_(std::move(u_fit)),
      c_fit_(std::move(c_fit)) {}

Prediction LinearMfRouter::predict(const Eigen::MatrixXd& features) const {
  check_features(features);
  const Eigen::MatrixXd projected = svd_.transform(features);
  return {u_fit_.predict(projected), c_fit_.predict(projected)};
}

std::unique_ptr<LinearMfRouter> fit_linear_mf(const RouterConfig& config, const FitInput& data) {
  RouterConfig cfg = config;
  cfg.kind = RouterKind::linear_mf;
  validate(cfg);
  check_fit_input(data);
  std::vector<std::string> warnings;
  TruncatedSvd svd = truncated_svd(data.x, cfg.rank, &warnings);
  const Eigen::MatrixXd projected = svd.transform(data.x);
  RidgeFit u_fit = fit_ridge(projected, data.u, cfg.ridge_penalty);
  RidgeFit c_fit = fit_ridge(projected, data.c, cfg.ridge_penalty);
  auto router = std::make_unique<LinearMfRouter>(cfg, std::move(svd), u_fit, c_fit);
  for (auto& w : warnings) router->note(std::move(w));
  note_unobserved(*router, u_fit, "utility");
  note_unobserved(*router, c_fit, "cost");
  return router;
}

}  // namespace mmroute
