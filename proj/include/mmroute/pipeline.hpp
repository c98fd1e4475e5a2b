#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mmroute/evaluation.hpp"
#include "mmroute/fusion.hpp"
#include "mmroute/outcome_store.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

// Scope name for metrics over all test rows at once.
inline constexpr const char* kPooledScope = "pooled";

// Gathers rows of a row-aligned matrix.
Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows);

// Fusion statistics frozen from the given (training) rows.
ModalityStats frozen_stats(const EmbeddingSet& set, std::span<const std::size_t> rows);

// Features for every row under `mode`, with the shared fusion settings.
Eigen::MatrixXd featurize(const EmbeddingSet& set, FusionMode mode, const FusionConfig& fusion,
                          const ModalityStats& stats);

// Inputs shared by every router of a run. All references must outlive use.
struct Experiment {
  const OutcomeTable& table;
  const EmbeddingSet& embeddings;
  const SplitSpec& split;
  const ModalityStats& stats;
  FusionConfig fusion;
  std::vector<double> lambda_grid;
  MetricOptions metric_options;
  bool allow_oracle = false;
};

struct RouterEvaluation {
  std::string label;
  RouterConfig config;
  std::vector<std::uint64_t> seeds;
  // Per seed: dataset (and kPooledScope) -> result.
  std::vector<std::map<std::string, DatasetResult>> per_seed;
  // Seed means of the metrics and of the operating points (per lambda).
  std::map<std::string, MetricValues> metrics;
  std::map<std::string, std::vector<OperatingPoint>> mean_points;
  MetricsReport report;  // macro aggregation of the per-dataset means
  std::vector<std::unique_ptr<TrainedRouter>> routers;  // one per seed; empty for the oracle
};

// Fits (one router per seed for stochastic kinds, otherwise the first seed
// only) on the train rows and evaluates on each test dataset and on the
// pooled test rows. The oracle is built per scope from the test outcomes.
RouterEvaluation run_router(const RouterConfig& config, const Experiment& experiment,
                            std::span<const std::uint64_t> seeds, std::string label = {});

// Evaluates an already fitted router on the test rows (no refit).
std::map<std::string, DatasetResult> evaluate_fitted(const TrainedRouter& router,
                                                     const Eigen::MatrixXd& features,
                                                     const Experiment& experiment);

}  // namespace mmroute
