#include <algorithm>

#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

namespace {

struct KindName {
  RouterKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {RouterKind::random, "random"}, {RouterKind::oracle, "oracle"},
    {RouterKind::kmeans, "kmeans"}, {RouterKind::knn, "knn"},
    {RouterKind::linear, "linear"}, {RouterKind::mlp, "mlp"},
    {RouterKind::linear_mf, "linear_mf"}, {RouterKind::mlp_mf, "mlp_mf"},
};

}  // namespace

std::string to_string(RouterKind kind) {
  for (const auto& entry : kKindNames)
    if (entry.kind == kind) return entry.name;
  return "unknown";
}

RouterKind parse_router_kind(const std::string& name) {
  for (const auto& entry : kKindNames)
    if (name == entry.name) return entry.kind;
  throw ConfigError("unknown router kind '" + name +
                    "' (expected random, oracle, kmeans, knn, linear, mlp, linear_mf or mlp_mf)");
}

const std::vector<RouterKind>& all_router_kinds() {
  static const std::vector<RouterKind> kinds = [] {
    std::vector<RouterKind> out;
    for (const auto& entry : kKindNames) out.push_back(entry.kind);
    return out;
  }();
  return kinds;
}

bool is_stochastic(RouterKind kind) {
  return kind == RouterKind::random || kind == RouterKind::kmeans || kind == RouterKind::mlp ||
         kind == RouterKind::mlp_mf;
}

FusionMode default_features(RouterKind kind) {
  switch (kind) {
    case RouterKind::linear:
    case RouterKind::mlp:
      return FusionMode::equal;
    default:
      return FusionMode::adaptive;
  }
}

void validate(const RouterConfig& config) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
  };
  switch (config.kind) {
    case RouterKind::kmeans:
      require(config.clusters >= 1, "kmeans needs at least one cluster");
      require(config.restarts >= 1, "kmeans needs at least one restart");
      break;
    case RouterKind::knn:
      require(config.neighbors >= 1, "knn needs at least one neighbor");
      break;
    case RouterKind::linear_mf:
      require(config.rank >= 1, "linear_mf rank must be positive");
      require(config.ridge_penalty >= 0.0, "linear_mf ridge penalty must be nonnegative");
      break;
    case RouterKind::mlp:
      require(config.hidden_dims.size() == 2, "mlp needs exactly two hidden layer sizes");
      require(std::all_of(config.hidden_dims.begin(), config.hidden_dims.end(),
                          [](std::size_t h) { return h > 0; }),
              "mlp hidden sizes must be positive");
      break;
    case RouterKind::mlp_mf:
      require(config.rank >= 1, "mlp_mf rank must be positive");
      require(config.mf_hidden >= 1, "mlp_mf hidden size must be positive");
      break;
    default:
      break;
  }
  if (config.kind == RouterKind::mlp || config.kind == RouterKind::mlp_mf) {
    require(config.epochs >= 1, "training needs at least one epoch");
    require(config.batch_size >= 1, "batch size must be positive");
    require(config.learning_rate > 0.0, "learning rate must be positive");
  }
}

Eligibility eligibility(const OutcomeTable& table, std::span<const std::size_t> rows) {
  Eligibility out(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(table.num_models()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t j = 0; j < table.num_models(); ++j)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = table.observed(rows[r], j);
  return out;
}

RouterPolicy TrainedRouter::route_prediction(const Prediction& prediction, double lambda,
                                             const Eligibility& eligible) const {
  return point_mass_policy(prediction, lambda, eligible);
}

RouterPolicy TrainedRouter::route(const Eigen::MatrixXd& features, double lambda,
                                  const Eligibility& eligible) const {
  return route_prediction(predict(features), lambda, eligible);
}

void TrainedRouter::check_features(const Eigen::MatrixXd& features) const {
  if (static_cast<std::size_t>(features.cols()) != feature_dim_)
    throw ValidationError("router expects " + std::to_string(feature_dim_) +
                          "-dimensional features, got " + std::to_string(features.cols()));
  if (!features.allFinite()) throw ValidationError("features contain non-finite values");
}

FitInput make_fit_input(const Eigen::MatrixXd& features, const OutcomeTable& table,
                        std::span<const std::size_t> train_rows,
                        std::span<const std::size_t> val_rows) {
  if (static_cast<std::size_t>(features.rows()) != table.num_instances())
    throw ValidationError("feature rows (" + std::to_string(features.rows()) +
                          ") do not match the outcome table (" +
                          std::to_string(table.num_instances()) + ")");
  auto gather = [&](std::span<const std::size_t> rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), features.cols());
    for (std::size_t r = 0; r < rows.size(); ++r)
      out.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(rows[r]));
    return out;
  };
  FitInput in;
  in.x = gather(train_rows);
  in.u = table.utility_rows(train_rows);
  in.c = table.cost_rows(train_rows);
  in.x_val = gather(val_rows);
  in.u_val = table.utility_rows(val_rows);
  in.c_val = table.cost_rows(val_rows);
  return in;
}

std::unique_ptr<TrainedRouter> fit_router(const RouterConfig& config, const FitInput& data) {
  validate(config);
  switch (config.kind) {
    case RouterKind::random:
      return fit_random(config, static_cast<std::size_t>(data.x.cols()),
                        static_cast<std::size_t>(data.u.cols()));
    case RouterKind::oracle:
      throw ConfigError("the oracle is built from evaluation outcomes, not fitted");
    case RouterKind::kmeans:
      return fit_kmeans(config, data);
    case RouterKind::knn:
      return fit_knn(config, data);
    case RouterKind::linear:
      return fit_linear(config, data);
    case RouterKind::mlp:
      return fit_mlp(config, data);
    case RouterKind::linear_mf:
      return fit_linear_mf(config, data);
    case RouterKind::mlp_mf:
      return fit_mlp_mf(config, data);
  }
  throw ConfigError("unhandled router kind");
}

}  // namespace mmroute
