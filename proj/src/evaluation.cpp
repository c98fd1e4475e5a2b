#include "mmroute/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "mmroute/error.hpp"
#include "mmroute/text_io.hpp"

namespace mmroute {

namespace {


PolicyValue evaluate_dense(const RouterPolicy& policy, const Eigen::MatrixXd& u,
                           const Eigen::MatrixXd& c,
                           const std::function<std::string(Eigen::Index, Eigen::Index)>& cell) {
  if (policy.rows() != u.rows() || policy.cols() != u.cols() || c.rows() != u.rows() ||
      c.cols() != u.cols())
    throw ValidationError("policy shape does not match the outcome rows");
  if (u.rows() == 0) throw ValidationError("cannot evaluate a policy on zero instances");
  double perf = 0.0, cost = 0.0;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    double row_perf = 0.0, row_cost = 0.0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double p = policy(i, j);
      if (p == 0.0) continue;
      if (p < 0.0) throw ValidationError("negative policy mass at " + cell(i, j));
      if (std::isnan(u(i, j)) || std::isnan(c(i, j)))
        throw ValidationError("policy puts mass on missing outcome " + cell(i, j));
      row_perf += p * u(i, j);
      row_cost += p * c(i, j);
    }
    perf += row_perf;
    cost += row_cost;
  }
  const auto n = static_cast<double>(u.rows());
  return {perf / n, cost / n};
}

}  // namespace

PolicyValue evaluate_policy(const RouterPolicy& policy, const OutcomeTable& table,
                            std::span<const std::size_t> rows) {
  const Eigen::MatrixXd u = table.utility_rows(rows);
  const Eigen::MatrixXd c = table.cost_rows(rows);
  return evaluate_dense(policy, u, c, [&](Eigen::Index i, Eigen::Index j) {
    return "(" + table.instances()[rows[static_cast<std::size_t>(i)]].instance_id + ", " +
           table.models()[static_cast<std::size_t>(j)].model_id + ")";
  });
}

PolicyValue evaluate_policy(const RouterPolicy& policy, const Eigen::MatrixXd& u,
                            const Eigen::MatrixXd& c) {
  return evaluate_dense(policy, u, c, [](Eigen::Index i, Eigen::Index j) {
    return "(row " + std::to_string(i) + ", model " + std::to_string(j) + ")";
  });
}

std::vector<double> default_lambda_grid() {
  std::vector<double> grid{0.0};
  for (int i = 0; i <= 32; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 32.0));
  return grid;
}

std::vector<OperatingPoint> sweep_lambda(const TrainedRouter& router,
                                         const Eigen::MatrixXd& features,
                                         const OutcomeTable& table,
                                         std::span<const std::size_t> rows,
                                         std::span<const double> grid) {
  if (grid.empty()) throw ConfigError("lambda grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] >= 0.0) || !std::isfinite(grid[i]))
      throw ConfigError("lambda values must be finite and nonnegative");
    if (i > 0 && grid[i] < grid[i - 1]) throw ConfigError("lambda grid must be sorted");
  }
  if (static_cast<std::size_t>(features.rows()) != rows.size())
    throw ValidationError("feature rows do not match the evaluation rows");
  const Prediction prediction = router.predict(features);
  const Eligibility eligible = eligibility(table, rows);
  std::vector<OperatingPoint> out;
  std::optional<PolicyValue> fixed;
  for (double lambda : grid) {
    PolicyValue v;
    if (!router.lambda_sensitive() && fixed) {
      v = *fixed;
    } else {
      v = evaluate_policy(router.route_prediction(prediction, lambda, eligible), table, rows);
      if (!router.lambda_sensitive()) fixed = v;
    }
    out.push_back({lambda, v.mean_cost, v.mean_perf, rows.size()});
  }
  return out;
}

Frontier pareto_envelope(std::span<const FrontierPoint> points) {
  if (points.empty()) throw ValidationError("pareto envelope of an empty point set");
  std::vector<FrontierPoint> sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), [](const FrontierPoint& a, const FrontierPoint& b) {
    return a.cost != b.cost ? a.cost < b.cost : a.perf > b.perf;
  });
  Frontier f;
  for (const auto& p : sorted) {
    if (!f.points.empty() && p.perf <= f.points.back().perf) continue;
    f.points.push_back(p);
  }
  return f;
}

Frontier pareto_envelope(std::span<const OperatingPoint> points) {
  std::vector<FrontierPoint> pts;
  pts.reserve(points.size());
  for (const auto& p : points) pts.push_back({p.mean_cost, p.mean_perf});
  return pareto_envelope(std::span<const FrontierPoint>(pts));
}

double curve_value(const Frontier& frontier, double c) {
  const auto& pts = frontier.points;
  if (pts.empty()) throw ValidationError("curve value of an empty frontier");
  if (c <= pts.front().cost) return pts.front().perf;
  if (c >= pts.back().cost) return pts.back().perf;
  // First point with cost > c; c lies in [prev.cost, next.cost).
  const auto next = std::upper_bound(pts.begin(), pts.end(), c,
                                     [](double v, const FrontierPoint& p) { return v < p.cost; });
  const auto prev = next - 1;
  const double t = (c - prev->cost) / (next->cost - prev->cost);
  return prev->perf + t * (next->perf - prev->perf);
}

std::optional<double> nauc(const Frontier& frontier, double c_min, double c_max,
                           bool single_point_convention) {
  if (!(c_max > c_min))
    throw ValidationError("nAUC needs c_max > c_min (got " + format_double(c_min) + ", " +
                          format_double(c_max) + ")");
  if (frontier.points.empty()) throw ValidationError("nAUC of an empty frontier");
  if (frontier.single_point() && !single_point_convention) return std::nullopt;

  std::vector<double> knots{c_min};
  for (const auto& p : frontier.points)
    if (p.cost > c_min && p.cost < c_max) knots.push_back(p.cost);
  knots.push_back(c_max);
  double area = 0.0;
  for (std::size_t i = 1; i < knots.size(); ++i)
    area += 0.5 * (knots[i] - knots[i - 1]) *
            (curve_value(frontier, knots[i - 1]) + curve_value(frontier, knots[i]));
  return area / (c_max - c_min);
}

double peak_score(std::span<const OperatingPoint> points) {
  if (points.empty()) throw ValidationError("peak score of an empty point set");
  double best = points.front().mean_perf;
  for (const auto& p : points) best = std::max(best, p.mean_perf);
  return best;
}

double qnc(const Frontier& frontier, double p_best, double c_best, double c_min, double c_max) {
  if (!(c_best > 0.0)) throw ValidationError("QNC needs a positive reference cost");
  const auto& pts = frontier.points;
  if (pts.empty()) throw ValidationError("QNC of an empty frontier");
  const double lo = std::min(c_min, pts.front().cost);
  const double hi = c_max;
  if (curve_value(frontier, lo) >= p_best) return lo / c_best;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto& a = pts[i - 1];
    const auto& b = pts[i];
    if (b.perf < p_best) continue;
    // p crosses p_best on [a.cost, b.cost]; a.perf < p_best here since p(lo) < p_best
    // and the envelope is increasing.
    const double c = a.perf >= p_best
                         ? a.cost
                         : a.cost + (p_best - a.perf) / (b.perf - a.perf) * (b.cost - a.cost);
    const double at = std::max(c, lo);
    return at <= hi ? at / c_best : kInfinity;
  }
  return kInfinity;
}

MetricValues compute_metrics(std::span<const OperatingPoint> points, const BestSingleModel& best,
                             const MetricOptions& options) {
  const Frontier f = pareto_envelope(points);
  MetricValues m;
  if (best.c_max > best.c_min) m.nauc = nauc(f, best.c_min, best.c_max, options.single_point_nauc);
  m.peak_score = peak_score(points);
  m.qnc = best.c_best > 0.0 ? qnc(f, best.p_best, best.c_best, best.c_min, best.c_max) : kInfinity;
  if (options.nauc_ratio && m.nauc && best.p_best > 0.0) m.nauc_ratio = *m.nauc / best.p_best;
  return m;
}

DatasetResult evaluate_router(const TrainedRouter& router, const Eigen::MatrixXd& features,
                              const OutcomeTable& table, std::span<const std::size_t> rows,
                              std::span<const double> grid, const MetricOptions& options,
                              std::string dataset) {
  DatasetResult r;
  r.dataset = std::move(dataset);
  r.best = best_single_model(table, rows);
  r.points = sweep_lambda(router, features, table, rows, grid);
  r.frontier = pareto_envelope(std::span<const OperatingPoint>(r.points));
  r.metrics = compute_metrics(r.points, r.best, options);
  return r;
}

MetricValues mean_metrics(std::span<const MetricValues> values) {
  if (values.empty()) throw ValidationError("mean of no metric values");
  MetricValues out;
  double nauc_sum = 0.0, ratio_sum = 0.0, peak_sum = 0.0, qnc_sum = 0.0;
  std::size_t nauc_n = 0, ratio_n = 0;
  bool any_inf = false;
  for (const auto& v : values) {
    if (v.nauc) {
      nauc_sum += *v.nauc;
      ++nauc_n;
    }
    if (v.nauc_ratio) {
      ratio_sum += *v.nauc_ratio;
      ++ratio_n;
    }
    out.nauc_partial = out.nauc_partial || v.nauc_partial;
    peak_sum += v.peak_score;
    if (std::isinf(v.qnc)) any_inf = true;
    else qnc_sum += v.qnc;
  }
  const auto n = static_cast<double>(values.size());
  if (nauc_n > 0) out.nauc = nauc_sum / static_cast<double>(nauc_n);
  if (nauc_n > 0 && nauc_n < values.size()) out.nauc_partial = true;
  if (ratio_n > 0) out.nauc_ratio = ratio_sum / static_cast<double>(ratio_n);
  out.peak_score = peak_sum / n;
  out.qnc = any_inf ? kInfinity : qnc_sum / n;
  return out;
}

MetricsReport aggregate(const std::map<std::string, MetricValues>& per_dataset,
                        const std::map<std::string, std::string>& dataset_scenario) {
  if (per_dataset.empty()) throw ValidationError("aggregate of no datasets");
  MetricsReport report;
  report.per_dataset = per_dataset;
  std::map<std::string, std::vector<MetricValues>> by_scenario;
  for (const auto& [dataset, values] : per_dataset) {
    const auto it = dataset_scenario.find(dataset);
    const std::string scenario = it == dataset_scenario.end() ? "other" : it->second;
    by_scenario[scenario].push_back(values);
  }
  std::vector<MetricValues> scenario_means;
  for (const auto& [scenario, values] : by_scenario) {
    report.per_scenario[scenario] = mean_metrics(values);
    scenario_means.push_back(report.per_scenario[scenario]);
  }
  report.overall = mean_metrics(scenario_means);
  return report;
}

std::string format_metric(std::optional<double> v) { return v ? format_metric(*v) : "--"; }

std::string format_metric(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return format_double(v);
}

std::string format_frontier_csv(std::span<const FrontierRow> rows) {
  std::ostringstream out;
  out << kFrontierHeader << '\n';
  for (const auto& r : rows)
    out << r.router << ',' << r.dataset << ',' << format_double(r.point.lambda) << ','
        << format_double(r.point.mean_cost) << ',' << format_double(r.point.mean_perf) << '\n';
  return out.str();
}

std::string format_metrics_csv(std::span<const MetricsRow> rows, bool with_ratio) {
  std::ostringstream out;
  out << kMetricsHeader << (with_ratio ? ",nauc_ratio" : "") << '\n';
  for (const auto& r : rows) {
    out << r.router << ',' << r.scope << ',' << format_metric(r.values.nauc) << ','
        << format_metric(r.values.peak_score) << ',' << format_metric(r.values.qnc);
    if (with_ratio) out << ',' << format_metric(r.values.nauc_ratio);
    out << '\n';
  }
  return out.str();
}

}  // namespace mmroute
