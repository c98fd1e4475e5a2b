#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmroute/evaluation.hpp"
#include "mmroute/fusion.hpp"
#include "mmroute/outcome_store.hpp"

namespace mmroute {

/// Planted-structure workload. Each instance belongs to a cluster; its image
/// vector points toward the cluster's image centroid with weight `salience`
/// and toward a fresh random direction with weight 1 - salience, and the text
/// vector the other way round:
///   x_img  = separation * (s * mu_img[c]  + (1 - s) * r) + noise_sigma * g / sqrt(d)
///   x_text = separation * ((1 - s) * mu_txt[c] + s * r') + noise_sigma * g' / sqrt(d)
/// then each row is l2-normalized. Utilities are Bernoulli(competence[c, j])
/// (or a clipped Gaussian around it); costs are cost_profile[j] times a
/// uniform jitter in [1 - cost_jitter, 1 + cost_jitter].
struct WorkloadSpec {
  std::size_t n = 1000;
  std::size_t d = 64;
  std::size_t models = 4;
  std::size_t clusters = 4;
  double separation = 4.0;
  double salience = 0.5;
  double noise_sigma = 1.0;
  Eigen::MatrixXd competence;        // clusters x models; empty = default
  std::vector<double> cost_profile;  // models; empty = normalized pool prices
  std::vector<double> mixture;       // cluster weights; empty = uniform
  bool continuous_utilities = false;
  double continuous_sd = 0.1;
  double cost_jitter = 0.05;
  std::vector<std::string> datasets{"synthetic"};  // assigned round-robin
  std::vector<std::string> scenarios;              // per dataset; default general_vqa
  std::uint64_t seed = 0;  // centroids and structure
  std::optional<std::uint64_t> sample_seed;  // instance draws; defaults to seed
  double rotation_angle = 0.0;               // radians, in a random 2-plane
  std::uint64_t rotation_seed = 0;
};

// Throws ConfigError for an infeasible spec.
void validate(const WorkloadSpec& spec);

// Competence used when WorkloadSpec::competence is empty: model (c mod K) is strong on
// cluster c (0.9) and every other model is weak (0.4).
Eigen::MatrixXd default_competence(std::size_t clusters, std::size_t models);
// The first `models` pool prices (cycled when more are asked), divided by their max.
std::vector<double> default_cost_profile(std::size_t models);
// Pool metadata for generated tables (the reference pool, then numbered extras).
std::vector<ModelMeta> synthetic_pool(std::size_t models);

struct Workload {
  EmbeddingSet embeddings;
  OutcomeTable table;
  std::vector<std::size_t> labels;  // planted cluster per instance
  Eigen::MatrixXd competence;
  Eigen::MatrixXd text_centroids;   // clusters x d, unit rows
  Eigen::MatrixXd image_centroids;
};

Workload gen_workload(const WorkloadSpec& spec);

struct ShiftSpec {
  std::vector<double> mixture;  // empty keeps the base mixture
  double rotation_angle = 0.0;
  std::uint64_t seed = 1;
};

// Same centroids and competence as `base`; new mixture, fresh samples, and a
// rotation of every embedding in a random 2-plane.
WorkloadSpec gen_shift(const WorkloadSpec& base, const ShiftSpec& shift);

// Cost-aware oracle operating points over the grid, enveloped. Requires every
// cell on `rows` to be observed.
Frontier oracle_frontier(const OutcomeTable& table, std::span<const std::size_t> rows,
                         std::span<const double> grid);

}  // namespace mmroute
