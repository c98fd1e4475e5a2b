#include "mmroute/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mmroute/evaluation.hpp"
#include "mmroute/fusion.hpp"
#include "mmroute/outcome_store.hpp"
#include "mmroute/pipeline.hpp"
#include "mmroute/routers.hpp"
#include "mmroute/svg_plot.hpp"
#include "mmroute/synthgen.hpp"
#include "mmroute/text_io.hpp"

namespace fs = std::filesystem;

namespace mmroute {

namespace {

fs::path resolve_against(const fs::path& p, const fs::path& base) {
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

struct LoadedData {
  OutcomeTable table;
  EmbeddingSet embeddings;
};

std::vector<ModelMeta> pool_for(const RunConfig& cfg) {
  if (cfg.pool.empty()) return reference_pool();
  return load_model_pool(cfg.pool);
}

OutcomeTable load_table(const RunConfig& cfg) {
  if (cfg.outcomes.empty()) throw ConfigError("no outcome file given ([paths] outcomes or --outcomes)");
  const auto pool = pool_for(cfg);
  auto table = load_outcomes(cfg.outcomes, pool);
  return cfg.normalize_costs ? normalize_table_costs(table) : table;
}

// Zeroes a modality wherever the outcome file flags it as absent, so the
// file flags and the vectors cannot disagree.
std::size_t apply_instance_masks(EmbeddingSet& set, const OutcomeTable& table) {
  std::size_t zeroed = 0;
  for (std::size_t i = 0; i < table.num_instances(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto& mask = table.instances()[i].mask;
    if (!mask.text && set.text.row(r).squaredNorm() > 0.0) {
      set.text.row(r).setZero();
      ++zeroed;
    }
    if (!mask.image && set.image.row(r).squaredNorm() > 0.0) {
      set.image.row(r).setZero();
      ++zeroed;
    }
  }
  return zeroed;
}

LoadedData load_data(const RunConfig& cfg) {
  auto table = load_table(cfg);
  if (cfg.embeddings.empty())
    throw ConfigError("no embedding file given ([paths] embeddings or --embeddings)");
  auto emb = load_embeddings(cfg.embeddings, table.num_instances());
  apply_instance_masks(emb, table);
  return {std::move(table), std::move(emb)};
}

std::string file_safe(const std::string& s) {
  std::string out;
  for (char ch : s) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') || (ch >= '0' && ch <= '9') ||
                    ch == '-' || ch == '_' || ch == '.';
    out.push_back(ok ? ch : '_');
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "unnamed" : out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw RuntimeError("cannot create directory " + dir.string() + ": " + ec.message());
}

// Renders a comma-separated table with padded columns.
std::string pretty_table(const std::string& csv) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    for (auto f : split_fields(line)) cells.emplace_back(f);
    rows.push_back(std::move(cells));
  }
  std::vector<std::size_t> width;
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (width.size() <= c) width.push_back(0);
      width[c] = std::max(width[c], r[c].size());
    }
  std::ostringstream out;
  for (const auto& r : rows) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      out << r[c];
      if (c + 1 < r.size()) out << std::string(width[c] - r[c].size() + 2, ' ');
    }
    out << '\n';
  }
  return out.str();
}

std::string format_delta(double a, double b) {
  // a - b, with infinities kept readable.
  if (std::isinf(a) || std::isinf(b)) {
    if (std::isinf(a) && std::isinf(b)) return "--";
    return std::isinf(a) ? "inf" : "-inf";
  }
  return format_double(a - b);
}

std::string format_optional_delta(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return "--";
  return format_double(*a - *b);
}

int report_error(const std::exception& e, std::ostream& err) {
  const int code = exit_code_for(e);
  const char* kind = code == 2 ? "validation error" : code == 3 ? "config error" : "error";
  err << "mmroute: " << kind << ": " << e.what() << '\n';
  return code;
}

template <typename F>
int guarded(std::ostream& err, F&& body) {
  try {
    body();
    return static_cast<int>(ExitCode::ok);
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

// Scope rows in the order they appear in metrics.csv.
void push_report_rows(std::vector<MetricsRow>& rows, const RouterEvaluation& ev) {
  for (const auto& [ds, m] : ev.report.per_dataset) rows.push_back({ev.label, ds, m});
  for (const auto& [sc, m] : ev.report.per_scenario) rows.push_back({ev.label, "scenario:" + sc, m});
  rows.push_back({ev.label, "overall", ev.report.overall});
  if (const auto it = ev.metrics.find(kPooledScope); it != ev.metrics.end())
    rows.push_back({ev.label, kPooledScope, it->second});
}

std::map<std::string, MetricValues> report_scopes(const RouterEvaluation& ev) {
  std::map<std::string, MetricValues> out;
  std::vector<MetricsRow> rows;
  push_report_rows(rows, ev);
  for (auto& r : rows) out[r.scope] = r.values;
  return out;
}

std::string fusion_delta_csv(const std::vector<std::pair<const RouterEvaluation*, const RouterEvaluation*>>& pairs) {
  std::ostringstream out;
  out << "router,scope,delta_nauc,delta_peak_score,qnc_equal,qnc_adaptive,delta_qnc\n";
  for (const auto& [equal, adaptive] : pairs) {
    const auto eq = report_scopes(*equal);
    const auto ad = report_scopes(*adaptive);
    std::vector<MetricsRow> order;
    push_report_rows(order, *adaptive);
    for (const auto& row : order) {
      const auto it = eq.find(row.scope);
      if (it == eq.end()) continue;
      const auto& a = ad.at(row.scope);
      const auto& e = it->second;
      out << to_string(equal->config.kind) << ',' << row.scope << ','
          << format_optional_delta(a.nauc, e.nauc) << ','
          << format_double(a.peak_score - e.peak_score) << ',' << format_metric(e.qnc) << ','
          << format_metric(a.qnc) << ',' << format_delta(a.qnc, e.qnc) << '\n';
    }
  }
  return out.str();
}

std::string points_csv(const std::vector<const RouterEvaluation*>& evals) {
  std::ostringstream out;
  out << "router,seed,dataset,lambda,mean_cost,mean_perf\n";
  for (const auto* ev : evals)
    for (std::size_t s = 0; s < ev->per_seed.size(); ++s)
      for (const auto& [scope, r] : ev->per_seed[s])
        for (const auto& p : r.points)
          out << ev->label << ',' << ev->seeds[s] << ',' << scope << ',' << format_double(p.lambda)
              << ',' << format_double(p.mean_cost) << ',' << format_double(p.mean_perf) << '\n';
  return out.str();
}

std::string envelopes_csv(const std::vector<const RouterEvaluation*>& evals) {
  std::ostringstream out;
  out << "router,seed,dataset,cost,perf\n";
  for (const auto* ev : evals)
    for (std::size_t s = 0; s < ev->per_seed.size(); ++s)
      for (const auto& [scope, r] : ev->per_seed[s])
        for (const auto& p : r.frontier.points)
          out << ev->label << ',' << ev->seeds[s] << ',' << scope << ',' << format_double(p.cost) << ','
              << format_double(p.perf) << '\n';
  return out.str();
}

std::string per_seed_metrics_csv(const std::vector<const RouterEvaluation*>& evals, bool with_ratio) {
  std::ostringstream out;
  out << "router,seed,dataset,nauc,peak_score,qnc" << (with_ratio ? ",nauc_ratio" : "") << '\n';
  for (const auto* ev : evals)
    for (std::size_t s = 0; s < ev->per_seed.size(); ++s)
      for (const auto& [scope, r] : ev->per_seed[s]) {
        out << ev->label << ',' << ev->seeds[s] << ',' << scope << ',' << format_metric(r.metrics.nauc)
            << ',' << format_metric(r.metrics.peak_score) << ',' << format_metric(r.metrics.qnc);
        if (with_ratio) out << ',' << format_metric(r.metrics.nauc_ratio);
        out << '\n';
      }
  return out.str();
}

std::string single_models_csv(const OutcomeTable& table, const SplitSpec& split) {
  std::ostringstream out;
  out << "dataset,model_id,mean_cost,mean_perf,best\n";
  std::vector<std::pair<std::string, std::vector<std::size_t>>> scopes;
  for (const auto& ds : table.datasets()) {
    auto rows = table.rows_in_dataset(split.test, ds);
    if (!rows.empty()) scopes.emplace_back(ds, std::move(rows));
  }
  scopes.emplace_back(kPooledScope, split.test);
  for (const auto& [scope, rows] : scopes) {
    std::optional<std::size_t> best;
    try {
      best = best_single_model(table, rows).model;
    } catch (const ValidationError&) {
      // No fully observed column; list the points without a best marker.
    }
    for (const auto& p : single_model_points(table, rows))
      out << scope << ',' << table.models()[p.model].model_id << ',' << format_double(p.mean_cost)
          << ',' << format_double(p.mean_perf) << ',' << (best && *best == p.model ? 1 : 0) << '\n';
  }
  return out.str();
}

void write_plots(const fs::path& dir, const std::vector<RouterEvaluation>& evals,
                 const OutcomeTable& table, const SplitSpec& split, bool log_x) {
  ensure_dir(dir);
  for (const auto& ds : table.datasets()) {
    const auto rows = table.rows_in_dataset(split.test, ds);
    if (rows.empty()) continue;
    std::vector<PlotSeries> series;
    for (const auto& ev : evals) {
      const auto it = ev.mean_points.find(ds);
      if (it == ev.mean_points.end()) continue;
      PlotSeries s;
      s.label = ev.label;
      for (const auto& p : pareto_envelope(std::span<const OperatingPoint>(it->second)).points)
        s.points.emplace_back(p.cost, p.perf);
      series.push_back(std::move(s));
    }
    for (const auto& p : single_model_points(table, rows)) {
      PlotSeries s;
      s.label = table.models()[p.model].model_id;
      s.markers_only = true;
      s.points.emplace_back(p.mean_cost, p.mean_perf);
      series.push_back(std::move(s));
    }
    PlotOptions opts;
    opts.title = ds;
    opts.log_x = log_x;
    write_file(dir / (file_safe(ds) + ".svg"), render_frontier_svg(series, opts));
  }
}

std::string ingest_report(const OutcomeTable& table, const std::optional<EmbeddingSet>& emb,
                          std::size_t zeroed) {
  std::ostringstream out;
  out << "instances: " << table.num_instances() << '\n';
  out << "models: " << table.num_models() << '\n';
  const auto& u = table.utilities();
  const auto& c = table.costs();
  std::size_t missing_u = 0, missing_c = 0;
  for (Eigen::Index i = 0; i < u.rows(); ++i)
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      missing_u += is_missing(u(i, j)) ? 1 : 0;
      missing_c += is_missing(c(i, j)) ? 1 : 0;
    }
  const double cells = static_cast<double>(u.size());
  out << "missing utility rate: " << format_double(cells > 0 ? missing_u / cells : 0.0) << '\n';
  out << "missing cost rate: " << format_double(cells > 0 ? missing_c / cells : 0.0) << '\n';

  std::vector<std::size_t> all(table.num_instances());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto scenarios = table.dataset_scenarios();
  out << "datasets: " << scenarios.size() << '\n';
  for (const auto& ds : table.datasets()) {
    const auto rows = table.rows_in_dataset(all, ds);
    out << "  " << ds << " (" << scenarios.at(ds) << "): " << rows.size() << " instances\n";
  }
  out << "per-model missing rate:\n";
  for (std::size_t j = 0; j < table.num_models(); ++j) {
    std::size_t miss = 0;
    for (std::size_t i = 0; i < table.num_instances(); ++i) miss += table.observed(i, j) ? 0 : 1;
    const double rate =
        table.num_instances() > 0 ? static_cast<double>(miss) / static_cast<double>(table.num_instances()) : 0.0;
    out << "  " << table.models()[j].model_id << ": " << format_double(rate) << '\n';
  }
  std::size_t text_only = 0, image_only = 0;
  for (const auto& inst : table.instances()) {
    text_only += inst.mask.text && !inst.mask.image ? 1 : 0;
    image_only += !inst.mask.text && inst.mask.image ? 1 : 0;
  }
  out << "text-only instances: " << text_only << '\n';
  out << "image-only instances: " << image_only << '\n';
  if (emb) {
    out << "embedding dim: " << emb->dim() << '\n';
    out << "embeddings unit-normalized: " << (emb->normalized ? "yes" : "no") << '\n';
    out << "modality vectors zeroed by instance masks: " << zeroed << '\n';
  }
  return out.str();
}

std::string labels_csv(const Workload& w) {
  std::ostringstream out;
  out << "instance_id,cluster\n";
  for (std::size_t i = 0; i < w.labels.size(); ++i)
    out << w.table.instances()[i].instance_id << ',' << w.labels[i] << '\n';
  return out.str();
}

void write_workload(const Workload& w, const fs::path& dir) {
  ensure_dir(dir);
  write_outcomes(w.table, dir / "outcomes.csv");
  write_model_pool(w.table.models(), dir / "pool.csv");
  write_embeddings(w.embeddings, dir / "embeddings.mmre");
  write_file(dir / "labels.csv", labels_csv(w));
}

Modality parse_mask(const std::string& name, bool& none) {
  none = false;
  if (name == "image") return Modality::image;
  if (name == "text") return Modality::text;
  if (name == "none") {
    none = true;
    return Modality::image;
  }
  throw ConfigError("unknown mask '" + name + "' (expected text, image, or none)");
}

}  // namespace

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ValidationError*>(&e)) return static_cast<int>(ExitCode::validation);
  if (dynamic_cast<const ConfigError*>(&e)) return static_cast<int>(ExitCode::config);
  return static_cast<int>(ExitCode::runtime);
}

RunConfig resolve_config(const CliOptions& options) {
  RunConfig cfg = default_run_config();
  if (options.config) {
    cfg = load_run_config(*options.config);
    const fs::path base = options.config->parent_path();
    cfg.outcomes = resolve_against(cfg.outcomes, base);
    cfg.embeddings = resolve_against(cfg.embeddings, base);
    cfg.pool = resolve_against(cfg.pool, base);
    cfg.out_dir = resolve_against(cfg.out_dir, base);
  }
  if (options.out) cfg.out_dir = *options.out;
  if (options.outcomes) cfg.outcomes = *options.outcomes;
  if (options.embeddings) cfg.embeddings = *options.embeddings;
  if (options.pool) cfg.pool = *options.pool;
  if (options.normalize_costs) cfg.normalize_costs = *options.normalize_costs;
  if (options.log_x) cfg.log_x = *options.log_x;
  if (options.allow_oracle) cfg.allow_oracle = true;
  if (options.fusion_override) cfg.fusion_override = parse_fusion_mode(*options.fusion_override);
  if (options.seed) {
    const auto s = *options.seed;
    cfg.split_seed = s;
    cfg.workload.seed = s;
    for (std::size_t i = 0; i < cfg.seeds.size(); ++i) cfg.seeds[i] = s + i;
  }
  return cfg;
}

int cmd_ingest(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(options);
    const auto table = load_table(cfg);
    std::optional<EmbeddingSet> emb;
    std::size_t zeroed = 0;
    if (!cfg.embeddings.empty()) {
      emb = load_embeddings(cfg.embeddings, table.num_instances());
      zeroed = apply_instance_masks(*emb, table);
    }
    const std::string report = ingest_report(table, emb, zeroed);
    ensure_dir(cfg.out_dir);
    write_file(cfg.out_dir / "ingest_report.txt", report);
    write_outcomes(table, cfg.out_dir / "outcomes.csv");
    write_model_pool(table.models(), cfg.out_dir / "pool.csv");
    if (emb) write_embeddings(*emb, cfg.out_dir / "embeddings.mmre");
    out << report;
  });
}

int cmd_gen(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(options);
    const auto w = gen_workload(cfg.workload);
    write_workload(w, cfg.out_dir);
    out << "generated " << w.table.num_instances() << " instances, " << w.table.num_models()
        << " models, d=" << w.embeddings.dim() << " -> " << cfg.out_dir.string() << '\n';
    if (cfg.shift) {
      const auto shifted = gen_workload(gen_shift(cfg.workload, *cfg.shift));
      write_workload(shifted, cfg.out_dir / "shift");
      out << "shifted workload -> " << (cfg.out_dir / "shift").string() << '\n';
    }
  });
}

int cmd_run(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    RunConfig cfg = resolve_config(options);
    if (cfg.routers.empty()) throw ConfigError("no routers configured");
    for (const auto& r : cfg.routers) {
      validate(r);
      if (r.kind == RouterKind::oracle && !cfg.allow_oracle)
        throw ConfigError(
            "the oracle router reads test outcomes and is analysis-only; pass --allow-oracle to "
            "include it");
    }
    for (auto kind : cfg.fusion_ablation)
      if (kind == RouterKind::oracle || kind == RouterKind::random)
        throw ConfigError("fusion ablation needs a feature-based router, got " + to_string(kind));
    if (cfg.fusion_override)
      for (auto& r : cfg.routers) r.features = *cfg.fusion_override;

    const auto data = load_data(cfg);
    for (const auto& ds : data.table.datasets())
      if (ds == kPooledScope)
        throw ValidationError(std::string("dataset name '") + kPooledScope + "' is reserved");
    const auto split =
        make_splits(data.table, cfg.train_fraction, cfg.val_fraction, cfg.split_seed);
    const auto stats = frozen_stats(data.embeddings, split.train);
    const Experiment experiment{data.table,
                                data.embeddings,
                                split,
                                stats,
                                cfg.fusion,
                                cfg.lambda_grid.empty() ? default_lambda_grid() : cfg.lambda_grid,
                                {cfg.single_point_nauc, cfg.nauc_ratio},
                                cfg.allow_oracle};

    std::vector<RouterEvaluation> evals;
    for (const auto& r : cfg.routers) evals.push_back(run_router(r, experiment, cfg.seeds));

    std::vector<RouterEvaluation> ablation;
    for (auto kind : cfg.fusion_ablation) {
      RouterConfig base{};
      base.kind = kind;
      for (const auto& r : cfg.routers)
        if (r.kind == kind) base = r;
      for (auto mode : {FusionMode::equal, FusionMode::adaptive}) {
        RouterConfig c = base;
        c.features = mode;
        ablation.push_back(run_router(c, experiment, cfg.seeds, to_string(kind) + "[" + to_string(mode) + "]"));
      }
    }

    const fs::path dir = cfg.out_dir;
    ensure_dir(dir);
    write_file(dir / "config.ini", format_run_config(cfg));
    write_file(dir / "split.json", format_split(split, data.table));

    std::vector<const RouterEvaluation*> all;
    for (auto& e : evals) all.push_back(&e);
    for (auto& e : ablation) all.push_back(&e);

    std::vector<FrontierRow> frontier_rows;
    std::vector<MetricsRow> metric_rows;
    for (const auto* ev : all) {
      for (const auto& [scope, pts] : ev->mean_points)
        for (const auto& p : pts) frontier_rows.push_back({ev->label, scope, p});
      push_report_rows(metric_rows, *ev);
    }
    const std::string metrics = format_metrics_csv(metric_rows, cfg.nauc_ratio);
    write_file(dir / "metrics.csv", metrics);
    write_file(dir / "frontier.csv", format_frontier_csv(frontier_rows));
    write_file(dir / "points.csv", points_csv(all));
    write_file(dir / "envelopes.csv", envelopes_csv(all));
    write_file(dir / "per_seed_metrics.csv", per_seed_metrics_csv(all, cfg.nauc_ratio));
    write_file(dir / "single_models.csv", single_models_csv(data.table, split));
    write_plots(dir / "plots", evals, data.table, split, cfg.log_x);

    std::ostringstream diag;
    const fs::path router_dir = dir / "routers";
    ensure_dir(router_dir);
    for (const auto* ev : all) {
      for (std::size_t s = 0; s < ev->routers.size(); ++s) {
        const auto& router = *ev->routers[s];
        const std::string name = file_safe(ev->label) + "_seed" + std::to_string(ev->seeds[s]);
        write_file(router_dir / (name + ".mmrr"), save_router(router));
        for (const auto& note : router.diagnostics()) diag << name << ": " << note << '\n';
      }
    }
    write_file(dir / "diagnostics.txt", diag.str());

    if (!ablation.empty()) {
      std::vector<std::pair<const RouterEvaluation*, const RouterEvaluation*>> pairs;
      for (std::size_t i = 0; i + 1 < ablation.size(); i += 2) pairs.emplace_back(&ablation[i], &ablation[i + 1]);
      const std::string deltas = fusion_delta_csv(pairs);
      write_file(dir / "fusion_deltas.csv", deltas);
      out << "\nadaptive minus equal fusion\n" << pretty_table(deltas);
    }
    out << pretty_table(metrics);
    out << "outputs -> " << dir.string() << '\n';
  });
}

int cmd_transfer(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(options);
    if (!options.router) throw ConfigError("transfer needs --router PATH");
    bool no_mask = false;
    const Modality which = parse_mask(options.mask, no_mask);
    const auto data = load_data(cfg);
    const auto router = load_router(read_file(*options.router), data.embeddings.dim());

    const auto split =
        make_splits(data.table, cfg.train_fraction, cfg.val_fraction, cfg.split_seed);
    // Statistics stay frozen at the unmasked training rows.
    const auto stats = frozen_stats(data.embeddings, split.train);
    const Experiment experiment{data.table,
                                data.embeddings,
                                split,
                                stats,
                                cfg.fusion,
                                cfg.lambda_grid.empty() ? default_lambda_grid() : cfg.lambda_grid,
                                {cfg.single_point_nauc, cfg.nauc_ratio},
                                false};
    const auto mode = router->feature_mode();
    const auto plain = featurize(data.embeddings, mode, cfg.fusion, stats);
    const auto masked_set = no_mask ? data.embeddings : mask_modality(data.embeddings, which);
    const auto masked = featurize(masked_set, mode, cfg.fusion, stats);
    if (!masked.allFinite()) throw RuntimeError("masked features are not finite");

    const auto before = evaluate_fitted(*router, plain, experiment);
    const auto after = evaluate_fitted(*router, masked, experiment);

    std::ostringstream csv;
    csv << "scope,mask,best_model,p_best,peak_unmasked,peak_masked,relative_drop,nauc_unmasked,"
           "nauc_masked,qnc_unmasked,qnc_masked\n";
    for (const auto& [scope, b] : before) {
      const auto& a = after.at(scope);
      const double drop = b.metrics.peak_score > 0.0
                              ? (b.metrics.peak_score - a.metrics.peak_score) / b.metrics.peak_score
                              : 0.0;
      csv << scope << ',' << options.mask << ',' << b.best.model_id << ','
          << format_double(b.best.p_best) << ',' << format_metric(b.metrics.peak_score) << ','
          << format_metric(a.metrics.peak_score) << ',' << format_double(drop) << ','
          << format_metric(b.metrics.nauc) << ',' << format_metric(a.metrics.nauc) << ','
          << format_metric(b.metrics.qnc) << ',' << format_metric(a.metrics.qnc) << '\n';
    }
    ensure_dir(cfg.out_dir);
    write_file(cfg.out_dir / "transfer.csv", csv.str());
    out << "router " << options.router->string() << " (" << to_string(router->kind()) << ", "
        << to_string(mode) << " features), mask=" << options.mask << ", no refit\n";
    out << pretty_table(csv.str());
  });
}

int cmd_report(const CliOptions& options, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    fs::path dir;
    if (options.run_dir) dir = *options.run_dir;
    else dir = resolve_config(options).out_dir;
    const fs::path metrics = dir / "metrics.csv";
    if (!fs::exists(metrics)) throw ConfigError("no metrics.csv in " + dir.string());
    out << pretty_table(read_file(metrics));
    for (const char* extra : {"fusion_deltas.csv", "transfer.csv"}) {
      if (!fs::exists(dir / extra)) continue;
      out << '\n' << extra << '\n' << pretty_table(read_file(dir / extra));
    }
  });
}

}  // namespace mmroute
