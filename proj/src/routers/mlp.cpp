#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

namespace {

constexpr std::uint64_t kUtilityInit = 0x75696e6974ULL;
constexpr std::uint64_t kUtilityOrder = 0x756f72646572ULL;
constexpr std::uint64_t kCostInit = 0x63696e6974ULL;
constexpr std::uint64_t kCostOrder = 0x636f72646572ULL;

TrainOptions train_options(const RouterConfig& cfg) {
  TrainOptions opts;
  opts.learning_rate = cfg.learning_rate;
  opts.epochs = cfg.epochs;
  opts.batch_size = cfg.batch_size;
  return opts;
}

std::vector<std::size_t> unobserved_columns(const Eigen::MatrixXd& y) {
  std::vector<std::size_t> out;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    if (y.col(j).array().isNaN().all()) out.push_back(static_cast<std::size_t>(j));
  return out;
}

void check_fit_input(const FitInput& data) {
  if (data.x.rows() < 1) throw ValidationError("training needs at least one row");
  if (data.u.rows() != data.x.rows() || data.c.rows() != data.x.rows())
    throw ValidationError("features and outcome rows differ in count");
  if (!data.x.allFinite()) throw ValidationError("training features contain non-finite values");
}

}  // namespace

MlpRouter::MlpRouter(RouterConfig config, Mlp u_net, Mlp c_net)
    : TrainedRouter(std::move(config), u_net.input_dim(), u_net.output_dim()),
      u_net_(std::move(u_net)),
      c_net_(std::move(c_net)) {}

Prediction MlpRouter::predict(const Eigen::MatrixXd& features) const {
  check_features(features);
  return {u_net_.forward(features), c_net_.forward(features)};
}

std::unique_ptr<MlpRouter> fit_mlp(const RouterConfig& config, const FitInput& data) {
  RouterConfig cfg = config;
  cfg.kind = RouterKind::mlp;
  validate(cfg);
  check_fit_input(data);
  const auto d = static_cast<std::size_t>(data.x.cols());
  const auto k = static_cast<std::size_t>(data.u.cols());
  const std::vector<std::size_t> sizes{d, cfg.hidden_dims[0], cfg.hidden_dims[1], k};

  auto train = [&](const Eigen::MatrixXd& y, std::uint64_t init_tag, std::uint64_t order_tag,
                   std::vector<double>& losses) {
    Mlp net(sizes);
    Rng init(derive_seed(cfg.seed, init_tag));
    net.init(init);
    Rng order(derive_seed(cfg.seed, order_tag));
    const LossFn loss = [&net](const Eigen::MatrixXd& xb, const Eigen::MatrixXd& yb,
                               Eigen::VectorXd& grad) { return net.loss_and_gradient(xb, yb, grad); };
    losses = train_adam(net.params(), loss, data.x, y, train_options(cfg), order).epoch_loss;
    return net;
  };
  std::vector<double> u_loss, c_loss;
  Mlp u_net = train(data.u, kUtilityInit, kUtilityOrder, u_loss);
  Mlp c_net = train(data.c, kCostInit, kCostOrder, c_loss);
  auto router = std::make_unique<MlpRouter>(cfg, std::move(u_net), std::move(c_net));
  router->utility_loss = std::move(u_loss);
  router->cost_loss = std::move(c_loss);
  for (auto j : unobserved_columns(data.u))
    router->note("model " + std::to_string(j) + " has no observed utilities; output untrained");
  return router;
}

MlpMfRouter::MlpMfRouter(RouterConfig config, LatentFactorNet u_net, LatentFactorNet c_net)
    : TrainedRouter(std::move(config), u_net.input_dim(), u_net.outputs()),
      u_net_(std::move(u_net)),
      c_net_(std::move(c_net)) {}

Prediction MlpMfRouter::predict(const Eigen::MatrixXd& features) const {
  check_features(features);
  return {u_net_.forward(features), c_net_.forward(features)};
}

std::unique_ptr<MlpMfRouter> fit_mlp_mf(const RouterConfig& config, const FitInput& data) {
  RouterConfig cfg = config;
  cfg.kind = RouterKind::mlp_mf;
  validate(cfg);
  check_fit_input(data);
  if ((data.u.array() == data.u.array()).count() == 0)
    throw ValidationError("no observed utilities to factorize");
  const auto d = static_cast<std::size_t>(data.x.cols());
  const auto k = static_cast<std::size_t>(data.u.cols());

  auto train = [&](const Eigen::MatrixXd& y, std::uint64_t init_tag, std::uint64_t order_tag,
                   std::vector<double>& losses) {
    LatentFactorNet net(d, cfg.mf_hidden, cfg.rank, k);
    Rng init(derive_seed(cfg.seed, init_tag));
    net.init(init);
    // A model without observations keeps its latent vector and bias at init.
    std::vector<bool> frozen(net.num_params(), false);
    for (auto j : unobserved_columns(y)) {
      for (std::size_t r = 0; r < cfg.rank; ++r) frozen[net.model_vector_offset() + r * k + j] = true;
      frozen[net.model_bias_offset() + j] = true;
    }
    Rng order(derive_seed(cfg.seed, order_tag));
    const LossFn loss = [&net](const Eigen::MatrixXd& xb, const Eigen::MatrixXd& yb,
                               Eigen::VectorXd& grad) { return net.loss_and_gradient(xb, yb, grad); };
    losses = train_adam(net.params(), loss, data.x, y, train_options(cfg), order, frozen).epoch_loss;
    return net;
  };
  std::vector<double> u_loss, c_loss;
  LatentFactorNet u_net = train(data.u, kUtilityInit, kUtilityOrder, u_loss);
  LatentFactorNet c_net = train(data.c, kCostInit, kCostOrder, c_loss);
  auto router = std::make_unique<MlpMfRouter>(cfg, std::move(u_net), std::move(c_net));
  router->utility_loss = std::move(u_loss);
  router->cost_loss = std::move(c_loss);
  for (auto j : unobserved_columns(data.u))
    router->note("model " + std::to_string(j) +
                 " has no observed utilities; its factors stay at initialization");
  return router;
}

}  // namespace mmroute
