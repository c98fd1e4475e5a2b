#pragma once

#include <Eigen/Dense>

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mmroute/outcome_store.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

struct OperatingPoint {
  double lambda = 0.0;
  double mean_cost = 0.0;
  double mean_perf = 0.0;
  std::size_t n_instances = 0;
};

struct FrontierPoint {
  double cost = 0.0;
  double perf = 0.0;
};

/// Pareto upper envelope: cost strictly increasing, perf strictly increasing.
struct Frontier {
  std::vector<FrontierPoint> points;
  bool single_point() const { return points.size() == 1; }
};

struct PolicyValue {
  double mean_perf = 0.0;
  double mean_cost = 0.0;
};

// Expected utility and cost per row under the policy, averaged over rows.
// Positive mass on a missing cell throws ValidationError naming the cell.
PolicyValue evaluate_policy(const RouterPolicy& policy, const OutcomeTable& table,
                            std::span<const std::size_t> rows);
PolicyValue evaluate_policy(const RouterPolicy& policy, const Eigen::MatrixXd& u,
                            const Eigen::MatrixXd& c);

// 0 followed by 33 log-spaced values from 1e-3 to 1e3.
std::vector<double> default_lambda_grid();

// One operating point per lambda. `features` holds the feature rows of
// `rows`, in the same order.
std::vector<OperatingPoint> sweep_lambda(const TrainedRouter& router,
                                         const Eigen::MatrixXd& features,
                                         const OutcomeTable& table,
                                         std::span<const std::size_t> rows,
                                         std::span<const double> grid);

Frontier pareto_envelope(std::span<const FrontierPoint> points);
Frontier pareto_envelope(std::span<const OperatingPoint> points);

// Piecewise-linear p(c), constant beyond either end. Throws on an empty frontier.
double curve_value(const Frontier& frontier, double c);

// Mean of p(c) over [c_min, c_max] by exact trapezoid integration. A single
// point frontier has no defined area unless `single_point_convention` is set,
// in which case the constant extension is integrated.
std::optional<double> nauc(const Frontier& frontier, double c_min, double c_max,
                           bool single_point_convention = false);

double peak_score(std::span<const OperatingPoint> points);

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Smallest cost at which p(c) reaches p_best, divided by c_best; +inf when it
// never does. The search runs from min(c_min, first frontier cost) to c_max.
double qnc(const Frontier& frontier, double p_best, double c_best, double c_min, double c_max);

// ---- reports ------------------------------------------------------------------

struct MetricValues {
  std::optional<double> nauc;  // nullopt prints as "--"
  double peak_score = 0.0;
  double qnc = kInfinity;
  std::optional<double> nauc_ratio;  // nauc / best single model's constant nauc
  bool nauc_partial = false;         // some inputs to a mean were undefined
};

struct MetricOptions {
  bool single_point_nauc = false;
  bool nauc_ratio = false;
};

struct DatasetResult {
  std::string dataset;
  std::vector<OperatingPoint> points;
  Frontier frontier;
  BestSingleModel best;
  MetricValues metrics;
};

// Sweep, envelope, and metrics of one router on `rows`.
DatasetResult evaluate_router(const TrainedRouter& router, const Eigen::MatrixXd& features,
                              const OutcomeTable& table, std::span<const std::size_t> rows,
                              std::span<const double> grid, const MetricOptions& options = {},
                              std::string dataset = {});

// Metrics of a set of operating points against a single-model reference.
MetricValues compute_metrics(std::span<const OperatingPoint> points, const BestSingleModel& best,
                             const MetricOptions& options = {});

// Unweighted mean of metric values. nAUC means skip undefined entries (and
// set nauc_partial); any +inf QNC makes the mean +inf.
MetricValues mean_metrics(std::span<const MetricValues> values);

struct MetricsReport {
  std::map<std::string, MetricValues> per_dataset;
  std::map<std::string, MetricValues> per_scenario;
  MetricValues overall;
  bool analysis_only = false;
};

// Macro means: datasets within each scenario, then scenarios.
MetricsReport aggregate(const std::map<std::string, MetricValues>& per_dataset,
                        const std::map<std::string, std::string>& dataset_scenario);

// ---- exports -----------------------------------------------------------------

inline constexpr const char* kFrontierHeader = "router,dataset,lambda,mean_cost,mean_perf";
inline constexpr const char* kMetricsHeader = "router,scope,nauc,peak_score,qnc";

std::string format_metric(std::optional<double> v);  // "--" for nullopt, "inf"
std::string format_metric(double v);

struct FrontierRow {
  std::string router;
  std::string dataset;
  OperatingPoint point;
};
std::string format_frontier_csv(std::span<const FrontierRow> rows);

struct MetricsRow {
  std::string router;
  std::string scope;
  MetricValues values;
};
// Adds a trailing nauc_ratio column when `with_ratio` is set.
std::string format_metrics_csv(std::span<const MetricsRow> rows, bool with_ratio = false);

}  // namespace mmroute
