#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmroute/fusion.hpp"
#include "mmroute/linalg.hpp"
#include "mmroute/nn.hpp"
#include "mmroute/outcome_store.hpp"

namespace mmroute {

enum class RouterKind { random, oracle, kmeans, knn, linear, mlp, linear_mf, mlp_mf };

std::string to_string(RouterKind kind);
RouterKind parse_router_kind(const std::string& name);
const std::vector<RouterKind>& all_router_kinds();

// Routers whose fit depends on the seed; they are averaged over several seeds.
bool is_stochastic(RouterKind kind);

// Feature construction each family uses unless overridden: adaptive fusion for
// the clustering, neighbor, and factorization routers; the equal average for
// the plain regressors.
FusionMode default_features(RouterKind kind);

struct RouterConfig {
  RouterKind kind = RouterKind::kmeans;
  std::size_t clusters = 20;
  std::size_t restarts = 10;  // kmeans: k-means++ runs, lowest inertia kept
  std::size_t neighbors = 10;
  std::size_t rank = 32;
  double ridge_penalty = 1.0;
  std::vector<std::size_t> hidden_dims{128, 128};
  std::size_t mf_hidden = 128;
  double learning_rate = 1e-3;
  std::size_t epochs = 100;
  std::size_t batch_size = 64;
  std::uint64_t seed = 0;
  bool cost_aware = true;             // oracle only
  bool cluster_stats_from_val = false;  // kmeans: per-cluster means from val rows
  std::optional<FusionMode> features;   // overrides default_features(kind)

  FusionMode feature_mode() const { return features.value_or(default_features(kind)); }
};

// Checks the fields the kind uses. Throws ConfigError.
void validate(const RouterConfig& config);

struct Prediction {
  Eigen::MatrixXd u_hat;  // n x K
  Eigen::MatrixXd c_hat;  // n x K
};

// n x K; rows are probability vectors.
using RouterPolicy = Eigen::MatrixXd;

// Which (instance, model) cells a policy may use. An empty matrix means all.
using Eligibility = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

Eligibility eligibility(const OutcomeTable& table, std::span<const std::size_t> rows);

/// argmin_j (1 - u_j + lambda * c_j) over eligible j; ties go to the lower
/// c_j, then the lower index. Throws ValidationError for empty input or when
/// nothing is eligible.
std::size_t select(std::span<const double> u_hat, std::span<const double> c_hat, double lambda,
                   const std::vector<bool>* eligible = nullptr);
std::size_t select(const Eigen::Ref<const Eigen::RowVectorXd>& u_hat,
                   const Eigen::Ref<const Eigen::RowVectorXd>& c_hat, double lambda,
                   const std::vector<bool>* eligible = nullptr);

// Point-mass policy selecting per row.
RouterPolicy point_mass_policy(const Prediction& prediction, double lambda,
                               const Eligibility& eligible);

/// A fitted routing policy. Predictions are always finite.
class TrainedRouter {
public:
  explicit TrainedRouter(RouterConfig config, std::size_t feature_dim, std::size_t num_models)
      : config_(std::move(config)), feature_dim_(feature_dim), num_models_(num_models) {}
  virtual ~TrainedRouter() = default;

  RouterKind kind() const { return config_.kind; }
  const RouterConfig& config() const { return config_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t num_models() const { return num_models_; }
  FusionMode feature_mode() const { return config_.feature_mode(); }

  virtual bool analysis_only() const { return false; }
  // A router whose policy ignores lambda yields a single operating point.
  virtual bool lambda_sensitive() const { return true; }

  virtual Prediction predict(const Eigen::MatrixXd& features) const = 0;
  virtual RouterPolicy route_prediction(const Prediction& prediction, double lambda,
                                        const Eligibility& eligible) const;
  RouterPolicy route(const Eigen::MatrixXd& features, double lambda,
                     const Eligibility& eligible = {}) const;

  // Fallbacks and rank reductions encountered while fitting.
  const std::vector<std::string>& diagnostics() const { return diagnostics_; }
  void note(std::string message) { diagnostics_.push_back(std::move(message)); }

protected:
  void check_features(const Eigen::MatrixXd& features) const;

private:
  RouterConfig config_;
  std::size_t feature_dim_;
  std::size_t num_models_;
  std::vector<std::string> diagnostics_;
};

/// Training rows: features and the matching outcome rows (NaN = missing).
/// The val block is only read by routers configured to use it.
struct FitInput {
  Eigen::MatrixXd x;
  Eigen::MatrixXd u;
  Eigen::MatrixXd c;
  Eigen::MatrixXd x_val;
  Eigen::MatrixXd u_val;
  Eigen::MatrixXd c_val;
};

// Gathers `rows` of `features` (aligned with the table) and their outcomes.
FitInput make_fit_input(const Eigen::MatrixXd& features, const OutcomeTable& table,
                        std::span<const std::size_t> train_rows,
                        std::span<const std::size_t> val_rows = {});

// ---- baselines ------------------------------------------------------------------

class RandomRouter final : public TrainedRouter {
public:
  RandomRouter(RouterConfig config, std::size_t feature_dim, std::size_t num_models);
  bool lambda_sensitive() const override { return false; }
  Prediction predict(const Eigen::MatrixXd& features) const override;
  // Uniform over the eligible models of each row.
  RouterPolicy route_prediction(const Prediction& prediction, double lambda,
                                const Eligibility& eligible) const override;
};

/// Reads the true outcomes of the rows it is evaluated on. Analysis only:
/// construction requires an explicit acknowledgment.
class OracleRouter final : public TrainedRouter {
public:
  OracleRouter(RouterConfig config, std::size_t feature_dim, Eigen::MatrixXd u,
               Eigen::MatrixXd c);
  bool analysis_only() const override { return true; }
  bool lambda_sensitive() const override { return config().cost_aware; }
  Prediction predict(const Eigen::MatrixXd& features) const override;
  RouterPolicy route_prediction(const Prediction& prediction, double lambda,
                                const Eligibility& eligible) const override;

private:
  Eigen::MatrixXd u_;
  Eigen::MatrixXd c_;
};

std::unique_ptr<TrainedRouter> fit_random(const RouterConfig& config, std::size_t feature_dim,
                                          std::size_t num_models);

// `acknowledged` must be true (the caller opted into analysis-only routing);
// otherwise ConfigError. u, c are the outcome rows of the evaluation split.
std::unique_ptr<OracleRouter> fit_oracle(const RouterConfig& config, std::size_t feature_dim,
                                         const Eigen::MatrixXd& u, const Eigen::MatrixXd& c,
                                         bool acknowledged);

// ---- clustering and neighbors ----------------------------------------------------

struct KMeansResult {
  Eigen::MatrixXd centroids;  // C x d
  std::vector<std::size_t> labels;
  std::size_t iterations = 0;
  double inertia = 0.0;  // sum of squared distances to assigned centroids
  std::vector<std::string> warnings;
};

// k-means++ seeding then Lloyd iterations until the largest centroid shift is
// below 1e-6 or 300 iterations. An empty cluster is re-seeded once at the
// point farthest from its centroid; if it empties again it is dropped.
KMeansResult kmeans(const Eigen::MatrixXd& x, std::size_t clusters, Rng& rng,
                    std::size_t max_iterations = 300, double tolerance = 1e-6);

// Index of the nearest row of `centroids` (squared Euclidean, ties to lower).
std::size_t nearest_centroid(const Eigen::MatrixXd& centroids,
                             const Eigen::Ref<const Eigen::RowVectorXd>& point);

class KMeansRouter final : public TrainedRouter {
public:
  KMeansRouter(RouterConfig config, Eigen::MatrixXd centroids, Eigen::MatrixXd cluster_u,
               Eigen::MatrixXd cluster_c);
  Prediction predict(const Eigen::MatrixXd& features) const override;

  const Eigen::MatrixXd& centroids() const { return centroids_; }
  const Eigen::MatrixXd& cluster_utilities() const { return cluster_u_; }
  const Eigen::MatrixXd& cluster_costs() const { return cluster_c_; }
  std::vector<std::size_t> assign(const Eigen::MatrixXd& features) const;

private:
  Eigen::MatrixXd centroids_;
  Eigen::MatrixXd cluster_u_;  // C x K
  Eigen::MatrixXd cluster_c_;
};

std::unique_ptr<KMeansRouter> fit_kmeans(const RouterConfig& config, const FitInput& data);

class KnnRouter final : public TrainedRouter {
public:
  KnnRouter(RouterConfig config, Eigen::MatrixXd x, Eigen::MatrixXd u, Eigen::MatrixXd c);
  Prediction predict(const Eigen::MatrixXd& features) const override;

  // Indices of the k nearest stored rows by cosine distance, nearest first.
  std::vector<std::size_t> neighbors(const Eigen::Ref<const Eigen::RowVectorXd>& query) const;
  // Number of (query, model) cells that fell back to the column mean in the
  // last predict call.
  std::size_t last_fallbacks() const { return last_fallbacks_; }

  const Eigen::MatrixXd& training_features() const { return x_; }
  const Eigen::MatrixXd& training_utilities() const { return u_; }
  const Eigen::MatrixXd& training_costs() const { return c_; }

private:
  Eigen::MatrixXd x_;
  Eigen::VectorXd x_norms_;
  Eigen::MatrixXd u_;
  Eigen::MatrixXd c_;
  Eigen::RowVectorXd u_mean_;
  Eigen::RowVectorXd c_mean_;
  mutable std::size_t last_fallbacks_ = 0;
};

std::unique_ptr<KnnRouter> fit_knn(const RouterConfig& config, const FitInput& data);

// ---- regressors ------------------------------------------------------------------------

inline constexpr double kLinearRidge = 1e-8;

class LinearRouter final : public TrainedRouter {
public:
  LinearRouter(RouterConfig config, std::size_t feature_dim, RidgeFit u_fit, RidgeFit c_fit);
  Prediction predict(const Eigen::MatrixXd& features) const override;
  const RidgeFit& utility_fit() const { return u_fit_; }
  const RidgeFit& cost_fit() const { return c_fit_; }

private:
  RidgeFit u_fit_;
  RidgeFit c_fit_;
};

std::unique_ptr<LinearRouter> fit_linear(const RouterConfig& config, const FitInput& data);

/// Shared rank-r projection (top right singular vectors of the train
/// features) followed by ridge regressions with penalty mu.
class LinearMfRouter final : public TrainedRouter {
public:
  LinearMfRouter(RouterConfig config, TruncatedSvd svd, RidgeFit u_fit, RidgeFit c_fit);
  Prediction predict(const Eigen::MatrixXd& features) const override;
  const TruncatedSvd& projection() const { return svd_; }
  const RidgeFit& utility_fit() const { return u_fit_; }
  const RidgeFit& cost_fit() const { return c_fit_; }

private:
  TruncatedSvd svd_;
  RidgeFit u_fit_;
  RidgeFit c_fit_;
};

std::unique_ptr<LinearMfRouter> fit_linear_mf(const RouterConfig& config, const FitInput& data);

class MlpRouter final : public TrainedRouter {
public:
  MlpRouter(RouterConfig config, Mlp u_net, Mlp c_net);
  Prediction predict(const Eigen::MatrixXd& features) const override;
  const Mlp& utility_net() const { return u_net_; }
  const Mlp& cost_net() const { return c_net_; }
  std::vector<double> utility_loss;  // per-epoch training loss
  std::vector<double> cost_loss;

private:
  Mlp u_net_;
  Mlp c_net_;
};

std::unique_ptr<MlpRouter> fit_mlp(const RouterConfig& config, const FitInput& data);

class MlpMfRouter final : public TrainedRouter {
public:
  MlpMfRouter(RouterConfig config, LatentFactorNet u_net, LatentFactorNet c_net);
  Prediction predict(const Eigen::MatrixXd& features) const override;
  const LatentFactorNet& utility_net() const { return u_net_; }
  const LatentFactorNet& cost_net() const { return c_net_; }
  std::vector<double> utility_loss;
  std::vector<double> cost_loss;

private:
  LatentFactorNet u_net_;
  LatentFactorNet c_net_;
};

std::unique_ptr<MlpMfRouter> fit_mlp_mf(const RouterConfig& config, const FitInput& data);

// Fits any learned kind (and random). The oracle goes through fit_oracle.
std::unique_ptr<TrainedRouter> fit_router(const RouterConfig& config, const FitInput& data);

// ---- persistence ---------------------------------------------------------------------

// Versioned little-endian blob: "MMRR", version, kind tag, config echo, then
// the kind's parameter arrays as f64. Oracle routers are not persistable.
std::string save_router(const TrainedRouter& router);
// Rejects blobs whose feature dimension differs from `expected_dim`.
std::unique_ptr<TrainedRouter> load_router(const std::string& bytes,
                                           std::optional<std::size_t> expected_dim = std::nullopt);

}  // namespace mmroute
