#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mmroute/fusion.hpp"
#include "mmroute/routers.hpp"
#include "mmroute/synthgen.hpp"

namespace mmroute {

/// Everything a run needs, read from an INI-style file:
///
///   [paths]    outcomes, embeddings, pool, out
///   [split]    train_fraction, val_fraction, seed
///   [fusion]   temperature, alpha, beta
///   [routers]  kinds = random,kmeans,knn,...
///   [router.<kind>]  clusters, restarts, neighbors, rank, ridge_penalty, hidden_dims,
///                    mf_hidden, learning_rate, epochs, batch_size,
///                    cost_aware, cluster_stats_from_val, features
///   [lambda]   grid = default | comma-separated values
///   [run]      seeds, normalize_costs, allow_oracle, single_point_nauc,
///              nauc_ratio, log_x, fusion_override, fusion_ablation
///   [workload] generator settings (gen command)
///   [shift]    mixture, rotation_angle, seed (optional shifted workload)
///
/// Unknown sections or keys are rejected so typos cannot pass silently.
struct RunConfig {
  std::filesystem::path outcomes;
  std::filesystem::path embeddings;
  std::filesystem::path pool;  // empty = reference pool
  std::filesystem::path out_dir = "run";

  double train_fraction = 0.2;
  double val_fraction = 0.25;
  std::uint64_t split_seed = 0;

  FusionConfig fusion;
  std::vector<RouterConfig> routers;
  std::vector<double> lambda_grid;

  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  bool normalize_costs = false;
  bool allow_oracle = false;
  bool single_point_nauc = false;
  bool nauc_ratio = false;
  bool log_x = true;
  std::optional<FusionMode> fusion_override;  // applied to every router
  std::vector<RouterKind> fusion_ablation;    // kinds rerun under equal vs adaptive

  WorkloadSpec workload;
  std::optional<ShiftSpec> shift;
};

RunConfig default_run_config();
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);

// Resolved configuration in the same INI dialect; parsing it back yields an
// equivalent RunConfig.
std::string format_run_config(const RunConfig& config);

}  // namespace mmroute
