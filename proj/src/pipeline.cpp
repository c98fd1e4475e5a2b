#include "mmroute/pipeline.hpp"

#include "mmroute/error.hpp"

namespace mmroute {

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, std::span<const std::size_t> rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = m.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

ModalityStats frozen_stats(const EmbeddingSet& set, std::span<const std::size_t> rows) {
  return compute_modality_stats(select_rows(set, rows));
}

Eigen::MatrixXd featurize(const EmbeddingSet& set, FusionMode mode, const FusionConfig& fusion,
                          const ModalityStats& stats) {
  FusionConfig cfg = fusion;
  cfg.mode = mode;
  return fuse(set, cfg, stats).z;
}

namespace {

std::vector<std::pair<std::string, std::vector<std::size_t>>> scopes(const Experiment& e) {
  std::vector<std::pair<std::string, std::vector<std::size_t>>> out;
  for (const auto& ds : e.table.datasets()) {
    auto rows = e.table.rows_in_dataset(e.split.test, ds);
    if (!rows.empty()) out.emplace_back(ds, std::move(rows));
  }
  out.emplace_back(kPooledScope, e.split.test);
  return out;
}

std::string default_label(const RouterConfig& config) {
  std::string label = to_string(config.kind);
  if (config.features && *config.features != default_features(config.kind))
    label += "[" + to_string(*config.features) + "]";
  return label;
}

}  // namespace

std::map<std::string, DatasetResult> evaluate_fitted(const TrainedRouter& router,
                                                     const Eigen::MatrixXd& features,
                                                     const Experiment& experiment) {
  std::map<std::string, DatasetResult> out;
  for (const auto& [scope, rows] : scopes(experiment))
    out[scope] = evaluate_router(router, gather_rows(features, rows), experiment.table, rows,
                                 experiment.lambda_grid, experiment.metric_options, scope);
  return out;
}

RouterEvaluation run_router(const RouterConfig& config, const Experiment& experiment,
                            std::span<const std::uint64_t> seeds, std::string label) {
  if (seeds.empty()) throw ConfigError("no seeds given");
  RouterEvaluation ev;
  ev.config = config;
  ev.label = label.empty() ? default_label(config) : std::move(label);
  const auto d = static_cast<std::size_t>(experiment.embeddings.dim());

  if (config.kind == RouterKind::oracle) {
    if (!experiment.allow_oracle)
      throw ConfigError(
          "the oracle reads ground-truth outcomes and is analysis-only; pass --allow-oracle "
          "to include it");
    ev.seeds = {seeds.front()};
    std::map<std::string, DatasetResult> results;
    for (const auto& [scope, rows] : scopes(experiment)) {
      const auto oracle = fit_oracle(config, d, experiment.table.utility_rows(rows),
                                     experiment.table.cost_rows(rows), true);
      const Eigen::MatrixXd placeholder = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                                static_cast<Eigen::Index>(d));
      results[scope] = evaluate_router(*oracle, placeholder, experiment.table, rows,
                                       experiment.lambda_grid, experiment.metric_options, scope);
    }
    ev.per_seed.push_back(std::move(results));
  } else {
    const Eigen::MatrixXd features =
        featurize(experiment.embeddings, config.feature_mode(), experiment.fusion, experiment.stats);
    const FitInput input =
        make_fit_input(features, experiment.table, experiment.split.train, experiment.split.val);
    if (is_stochastic(config.kind)) ev.seeds.assign(seeds.begin(), seeds.end());
    else ev.seeds = {seeds.front()};
    for (auto seed : ev.seeds) {
      RouterConfig cfg = config;
      cfg.seed = seed;
      auto router = fit_router(cfg, input);
      ev.per_seed.push_back(evaluate_fitted(*router, features, experiment));
      ev.routers.push_back(std::move(router));
    }
  }

  for (const auto& [scope, first] : ev.per_seed.front()) {
    std::vector<MetricValues> values;
    std::vector<OperatingPoint> mean = first.points;
    for (auto& p : mean) p.mean_cost = p.mean_perf = 0.0;
    for (const auto& seed_results : ev.per_seed) {
      const auto& r = seed_results.at(scope);
      values.push_back(r.metrics);
      for (std::size_t i = 0; i < mean.size(); ++i) {
        mean[i].mean_cost += r.points[i].mean_cost;
        mean[i].mean_perf += r.points[i].mean_perf;
      }
    }
    const auto n = static_cast<double>(ev.per_seed.size());
    for (auto& p : mean) {
      p.mean_cost /= n;
      p.mean_perf /= n;
    }
    ev.metrics[scope] = mean_metrics(values);
    ev.mean_points[scope] = std::move(mean);
  }

  std::map<std::string, MetricValues> per_dataset;
  for (const auto& [scope, m] : ev.metrics)
    if (scope != kPooledScope) per_dataset[scope] = m;
  ev.report = aggregate(per_dataset, experiment.table.dataset_scenarios());
  ev.report.analysis_only = config.kind == RouterKind::oracle;
  return ev;
}

}  // namespace mmroute
