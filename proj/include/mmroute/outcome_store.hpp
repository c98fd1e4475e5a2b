#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mmroute {

enum class Tier { commercial, open_weight };

struct ModelMeta {
  std::string model_id;
  std::string display_name;
  Tier tier = Tier::open_weight;
  double price_per_million_output_tokens = 0.0;  // USD / 1M output tokens
  std::optional<long long> context_length;
  bool supports_text = true;
  bool supports_image = true;
  // Extension hooks; the default pricing only charges output tokens.
  std::optional<double> price_per_million_input_tokens;
  std::optional<double> price_per_million_image_tokens;
};

struct ModalityMask {
  bool text = true;
  bool image = true;
};

struct TokenCounts {
  long long input_tokens = 0;
  long long image_tokens = 0;
  std::map<std::string, long long> output_tokens;  // model_id -> tokens
};

struct Instance {
  std::string instance_id;
  std::string dataset;
  std::string scenario;  // ocr | general_vqa | math_reasoning | anything else
  ModalityMask mask;
  std::optional<TokenCounts> tokens;
};

inline bool is_missing(double v) { return std::isnan(v); }
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

/// The offline environment: per-(instance, model) utility in [0,1] and cost
/// >= 0. Missing cells are NaN. Immutable once constructed; construction
/// validates every invariant and throws ValidationError on the first breach.
class OutcomeTable {
public:
  OutcomeTable(std::vector<ModelMeta> models, std::vector<Instance> instances,
               Eigen::MatrixXd utilities, Eigen::MatrixXd costs);

  std::size_t num_instances() const { return instances_.size(); }
  std::size_t num_models() const { return models_.size(); }

  const std::vector<ModelMeta>& models() const { return models_; }
  const std::vector<Instance>& instances() const { return instances_; }
  const Eigen::MatrixXd& utilities() const { return utilities_; }
  const Eigen::MatrixXd& costs() const { return costs_; }

  double utility(std::size_t i, std::size_t j) const { return utilities_(i, j); }
  double cost(std::size_t i, std::size_t j) const { return costs_(i, j); }
  // Both utility and cost present; a policy may only put mass on such cells.
  bool observed(std::size_t i, std::size_t j) const {
    return !is_missing(utilities_(i, j)) && !is_missing(costs_(i, j));
  }

  std::optional<std::size_t> model_index(const std::string& model_id) const;
  std::optional<std::size_t> instance_index(const std::string& instance_id) const;

  // Sorted unique dataset tags, and the scenario each belongs to.
  std::vector<std::string> datasets() const;
  std::map<std::string, std::string> dataset_scenarios() const;
  // Subset of `rows` whose dataset tag equals `dataset`, order preserved.
  std::vector<std::size_t> rows_in_dataset(std::span<const std::size_t> rows,
                                           const std::string& dataset) const;

  // Gathers the given rows into dense matrices (missing cells stay NaN).
  Eigen::MatrixXd utility_rows(std::span<const std::size_t> rows) const;
  Eigen::MatrixXd cost_rows(std::span<const std::size_t> rows) const;

  OutcomeTable with_costs(Eigen::MatrixXd costs) const;

private:
  std::vector<ModelMeta> models_;
  std::vector<Instance> instances_;
  Eigen::MatrixXd utilities_;
  Eigen::MatrixXd costs_;
};

// ---- model pool --------------------------------------------------------

// The ten-model pool with its per-1M-output-token prices.
const std::vector<ModelMeta>& reference_pool();

std::vector<ModelMeta> load_model_pool(const std::filesystem::path& path);
void write_model_pool(std::span<const ModelMeta> pool, const std::filesystem::path& path);
void validate_pool(std::span<const ModelMeta> pool);

// ---- outcome file --------------------------------------------------------

inline constexpr const char* kOutcomeHeader =
    "instance_id,dataset,scenario,m_text,m_img,model_id,utility,cost";

OutcomeTable load_outcomes(const std::filesystem::path& path, std::span<const ModelMeta> pool);
OutcomeTable parse_outcomes(const std::string& contents, std::span<const ModelMeta> pool);
std::string format_outcomes(const OutcomeTable& table);
void write_outcomes(const OutcomeTable& table, const std::filesystem::path& path);

// ---- costs ---------------------------------------------------------------

// raw_i / max(raw). Throws ValidationError for negatives or an all-zero vector.
std::vector<double> normalize_costs(std::span<const double> raw);

// output_tokens * price / 1e6, in USD.
double token_cost(long long output_tokens, double price_per_million);

// Charge for one instance-model pair: output tokens at the output price plus
// input/image tokens when the model carries those optional prices.
double instance_cost(const TokenCounts& tokens, const ModelMeta& model);

// Rescales every cost cell so the model with the largest mean raw cost has
// mean cost exactly 1 (the per-model normalization applied to a table).
OutcomeTable normalize_table_costs(const OutcomeTable& table);

// ---- splits ----------------------------------------------------------------

struct SplitSpec {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
  double train_fraction = 0.2;
  double val_fraction_of_train = 0.25;
};

enum class SplitPart { train, val, test };

// Seeded shuffle stratified by dataset tag. The train+val pool gets exactly
// round(n * train_fraction) rows (largest-remainder apportionment over
// strata); val is carved from it the same way. Index lists are sorted.
SplitSpec make_splits(const OutcomeTable& table, double train_fraction,
                      double val_fraction_of_train, std::uint64_t seed);

std::string format_split(const SplitSpec& split, const OutcomeTable& table);
SplitSpec parse_split(const std::string& contents, const OutcomeTable& table);

const std::vector<std::size_t>& split_rows(const SplitSpec& split, SplitPart part);

// ---- single-model references ---------------------------------------------

struct BestSingleModel {
  std::size_t model = 0;
  std::string model_id;
  double p_best = 0.0;
  double c_best = 0.0;
  double c_min = 0.0;  // mean cost of the cheapest always-pick-one policy
  double c_max = 0.0;  // mean cost of the most expensive one
};

struct SingleModelPoint {
  std::size_t model = 0;
  double mean_cost = 0.0;
  double mean_perf = 0.0;
};

// Mean (cost, utility) of each model column fully observed on `rows`.
std::vector<SingleModelPoint> single_model_points(const OutcomeTable& table,
                                                  std::span<const std::size_t> rows);

// Only fully observed columns are eligible; ties on p_best go to lower mean
// cost, then lower index. Throws ValidationError when no column qualifies.
BestSingleModel best_single_model(const OutcomeTable& table, std::span<const std::size_t> rows);
BestSingleModel best_single_model(const OutcomeTable& table, const SplitSpec& split,
                                  SplitPart which = SplitPart::test);

}  // namespace mmroute
