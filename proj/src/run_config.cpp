#include "mmroute/run_config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "mmroute/error.hpp"
#include "mmroute/evaluation.hpp"
#include "mmroute/text_io.hpp"

namespace mmroute {

namespace pt = boost::property_tree;

namespace {

using Section = pt::ptree;

std::string where(const std::string& section, const std::string& key) {
  return "[" + section + "] " + key;
}

double to_double(const std::string& section, const std::string& key, const std::string& v) {
  auto d = parse_double(trim(v));
  if (!d) throw ConfigError(where(section, key) + ": '" + v + "' is not a number");
  return *d;
}

std::uint64_t to_u64(const std::string& section, const std::string& key, const std::string& v) {
  auto i = parse_int(trim(v));
  if (!i || *i < 0) throw ConfigError(where(section, key) + ": '" + v + "' is not a nonnegative integer");
  return static_cast<std::uint64_t>(*i);
}

bool to_bool(const std::string& section, const std::string& key, const std::string& v) {
  const std::string s(trim(v));
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw ConfigError(where(section, key) + ": '" + v + "' is not a boolean");
}

std::vector<std::string> to_list(const std::string& v, char delim = ',') {
  std::vector<std::string> out;
  for (auto f : split_fields(v, delim)) {
    const auto t = trim(f);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::vector<double> to_doubles(const std::string& section, const std::string& key,
                               const std::string& v) {
  std::vector<double> out;
  for (const auto& s : to_list(v)) out.push_back(to_double(section, key, s));
  return out;
}

template <typename Fn>
void for_keys(const Section& section, const std::string& name, Fn fn) {
  for (const auto& [key, node] : section) {
    if (!node.empty()) throw ConfigError("[" + name + "] " + key + ": nested values are not allowed");
    if (!fn(key, node.data())) throw ConfigError("unknown key " + where(name, key));
  }
}

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string join_doubles(const std::vector<double>& v) {
  std::vector<std::string> s;
  for (double d : v) s.push_back(format_double(d));
  return join(s);
}

void apply_router_key(RouterConfig& r, const std::string& section, const std::string& key,
                      const std::string& v, bool& known) {
  known = true;
  if (key == "clusters") r.clusters = to_u64(section, key, v);
  else if (key == "restarts") r.restarts = to_u64(section, key, v);
  else if (key == "neighbors") r.neighbors = to_u64(section, key, v);
  else if (key == "rank") r.rank = to_u64(section, key, v);
  else if (key == "ridge_penalty") r.ridge_penalty = to_double(section, key, v);
  else if (key == "hidden_dims") {
    r.hidden_dims.clear();
    for (const auto& s : to_list(v)) r.hidden_dims.push_back(to_u64(section, key, s));
  } else if (key == "mf_hidden") r.mf_hidden = to_u64(section, key, v);
  else if (key == "learning_rate") r.learning_rate = to_double(section, key, v);
  else if (key == "epochs") r.epochs = to_u64(section, key, v);
  else if (key == "batch_size") r.batch_size = to_u64(section, key, v);
  else if (key == "cost_aware") r.cost_aware = to_bool(section, key, v);
  else if (key == "cluster_stats_from_val") r.cluster_stats_from_val = to_bool(section, key, v);
  else if (key == "features") {
    const std::string s(trim(v));
    if (s == "default") r.features.reset();
    else r.features = parse_fusion_mode(s);
  } else known = false;
}

Eigen::MatrixXd parse_matrix(const std::string& section, const std::string& key,
                             const std::string& v) {
  const auto rows = to_list(v, '|');
  if (rows.empty()) return {};
  std::vector<std::vector<double>> values;
  for (const auto& row : rows) values.push_back(to_doubles(section, key, row));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(values.size()),
                    static_cast<Eigen::Index>(values.front().size()));
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].size() != values.front().size())
      throw ConfigError(where(section, key) + ": rows differ in length");
    for (std::size_t j = 0; j < values[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i][j];
  }
  return m;
}

}  // namespace

RunConfig default_run_config() {
  RunConfig c;
  for (auto kind : {RouterKind::random, RouterKind::kmeans, RouterKind::knn, RouterKind::linear,
                    RouterKind::mlp, RouterKind::linear_mf, RouterKind::mlp_mf}) {
    RouterConfig r;
    r.kind = kind;
    c.routers.push_back(r);
  }
  c.lambda_grid = default_lambda_grid();
  return c;
}

RunConfig parse_run_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  RunConfig c = default_run_config();
  std::map<RouterKind, std::vector<std::pair<std::string, std::string>>> router_keys;
  std::optional<std::vector<RouterKind>> kinds;

  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty())
      throw ConfigError("config: key '" + name + "' outside any section");
    if (name == "paths") {
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k == "outcomes") c.outcomes = v;
        else if (k == "embeddings") c.embeddings = v;
        else if (k == "pool") c.pool = v;
        else if (k == "out") c.out_dir = v;
        else return false;
        return true;
      });
    } else if (name == "split") {
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k == "train_fraction") c.train_fraction = to_double(name, k, v);
        else if (k == "val_fraction") c.val_fraction = to_double(name, k, v);
        else if (k == "seed") c.split_seed = to_u64(name, k, v);
        else return false;
        return true;
      });
    } else if (name == "fusion") {
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k == "temperature") c.fusion.temperature = to_double(name, k, v);
        else if (k == "alpha") c.fusion.alpha = to_double(name, k, v);
        else if (k == "beta") c.fusion.beta = to_double(name, k, v);
        else return false;
        return true;
      });
    } else if (name == "routers") {
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k != "kinds") return false;
        kinds.emplace();
        for (const auto& s : to_list(v)) kinds->push_back(parse_router_kind(s));
        return true;
      });
    } else if (name.rfind("router.", 0) == 0) {
      const RouterKind kind = parse_router_kind(name.substr(7));
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        router_keys[kind].emplace_back(k, v);
        return true;
      });
    } else if (name == "lambda") {
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k != "grid") return false;
        if (trim(v) == "default") c.lambda_grid = default_lambda_grid();
        else c.lambda_grid = to_doubles(name, k, v);
        return true;
      });
    } else if (name == "run") {
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k == "seeds") {
          c.seeds.clear();
          for (const auto& s : to_list(v)) c.seeds.push_back(to_u64(name, k, s));
        } else if (k == "normalize_costs") c.normalize_costs = to_bool(name, k, v);
        else if (k == "allow_oracle") c.allow_oracle = to_bool(name, k, v);
        else if (k == "single_point_nauc") c.single_point_nauc = to_bool(name, k, v);
        else if (k == "nauc_ratio") c.nauc_ratio = to_bool(name, k, v);
        else if (k == "log_x") c.log_x = to_bool(name, k, v);
        else if (k == "fusion_override") {
          const std::string s(trim(v));
          if (s == "none" || s.empty()) c.fusion_override.reset();
          else c.fusion_override = parse_fusion_mode(s);
        } else if (k == "fusion_ablation") {
          c.fusion_ablation.clear();
          for (const auto& s : to_list(v)) c.fusion_ablation.push_back(parse_router_kind(s));
        } else return false;
        return true;
      });
    } else if (name == "workload") {
      WorkloadSpec& w = c.workload;
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k == "n") w.n = to_u64(name, k, v);
        else if (k == "d") w.d = to_u64(name, k, v);
        else if (k == "models") w.models = to_u64(name, k, v);
        else if (k == "clusters") w.clusters = to_u64(name, k, v);
        else if (k == "separation") w.separation = to_double(name, k, v);
        else if (k == "salience") w.salience = to_double(name, k, v);
        else if (k == "noise_sigma") w.noise_sigma = to_double(name, k, v);
        else if (k == "competence") w.competence = parse_matrix(name, k, v);
        else if (k == "cost_profile") w.cost_profile = to_doubles(name, k, v);
        else if (k == "mixture") w.mixture = to_doubles(name, k, v);
        else if (k == "continuous_utilities") w.continuous_utilities = to_bool(name, k, v);
        else if (k == "continuous_sd") w.continuous_sd = to_double(name, k, v);
        else if (k == "cost_jitter") w.cost_jitter = to_double(name, k, v);
        else if (k == "datasets") w.datasets = to_list(v);
        else if (k == "scenarios") w.scenarios = to_list(v);
        else if (k == "seed") w.seed = to_u64(name, k, v);
        else return false;
        return true;
      });
    } else if (name == "shift") {
      ShiftSpec s;
      for_keys(section, name, [&](const std::string& k, const std::string& v) {
        if (k == "mixture") s.mixture = to_doubles(name, k, v);
        else if (k == "rotation_angle") s.rotation_angle = to_double(name, k, v);
        else if (k == "seed") s.seed = to_u64(name, k, v);
        else return false;
        return true;
      });
      c.shift = s;
    } else {
      throw ConfigError("unknown config section [" + name + "]");
    }
  }

  if (kinds) {
    c.routers.clear();
    std::set<RouterKind> seen;
    for (auto kind : *kinds) {
      if (!seen.insert(kind).second)
        throw ConfigError("[routers] kinds lists " + to_string(kind) + " twice");
      RouterConfig r;
      r.kind = kind;
      c.routers.push_back(r);
    }
  }
  for (const auto& [kind, keys] : router_keys) {
    auto it = std::find_if(c.routers.begin(), c.routers.end(),
                           [&](const RouterConfig& r) { return r.kind == kind; });
    if (it == c.routers.end())
      throw ConfigError("[router." + to_string(kind) + "] configures a router not listed in [routers]");
    for (const auto& [k, v] : keys) {
      bool known = false;
      apply_router_key(*it, "router." + to_string(kind), k, v, known);
      if (!known) throw ConfigError("unknown key " + where("router." + to_string(kind), k));
    }
  }

  if (!(c.train_fraction > 0.0 && c.train_fraction < 1.0))
    throw ConfigError("[split] train_fraction must lie in (0, 1)");
  if (!(c.val_fraction >= 0.0 && c.val_fraction < 1.0))
    throw ConfigError("[split] val_fraction must lie in [0, 1)");
  if (!(c.fusion.temperature > 0.0)) throw ConfigError("[fusion] temperature must be positive");
  if (c.lambda_grid.empty()) throw ConfigError("[lambda] grid is empty");
  for (std::size_t i = 0; i < c.lambda_grid.size(); ++i)
    if (!(c.lambda_grid[i] >= 0.0) || (i && c.lambda_grid[i] < c.lambda_grid[i - 1]))
      throw ConfigError("[lambda] grid must be nonnegative and sorted");
  if (c.seeds.empty()) throw ConfigError("[run] seeds is empty");
  for (const auto& r : c.routers) validate(r);
  return c;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ValidationError& e) {
    throw ConfigError(e.what());
  }
  return parse_run_config(text);
}

std::string format_run_config(const RunConfig& c) {
  std::ostringstream out;
  out << "[paths]\n";
  out << "outcomes = " << c.outcomes.string() << "\n";
  out << "embeddings = " << c.embeddings.string() << "\n";
  out << "pool = " << c.pool.string() << "\n";
  out << "out = " << c.out_dir.string() << "\n\n";

  out << "[split]\ntrain_fraction = " << format_double(c.train_fraction)
      << "\nval_fraction = " << format_double(c.val_fraction) << "\nseed = " << c.split_seed
      << "\n\n";
  out << "[fusion]\ntemperature = " << format_double(c.fusion.temperature)
      << "\nalpha = " << format_double(c.fusion.alpha) << "\nbeta = " << format_double(c.fusion.beta)
      << "\n\n";

  std::vector<std::string> kinds;
  for (const auto& r : c.routers) kinds.push_back(to_string(r.kind));
  out << "[routers]\nkinds = " << join(kinds) << "\n\n";
  for (const auto& r : c.routers) {
    out << "[router." << to_string(r.kind) << "]\n";
    out << "clusters = " << r.clusters << "\nrestarts = " << r.restarts << "\nneighbors = " << r.neighbors << "\nrank = " << r.rank
        << "\nridge_penalty = " << format_double(r.ridge_penalty) << "\n";
    std::vector<std::string> hidden;
    for (auto h : r.hidden_dims) hidden.push_back(std::to_string(h));
    out << "hidden_dims = " << join(hidden) << "\nmf_hidden = " << r.mf_hidden
        << "\nlearning_rate = " << format_double(r.learning_rate) << "\nepochs = " << r.epochs
        << "\nbatch_size = " << r.batch_size << "\ncost_aware = " << (r.cost_aware ? "true" : "false")
        << "\ncluster_stats_from_val = " << (r.cluster_stats_from_val ? "true" : "false")
        << "\nfeatures = " << (r.features ? to_string(*r.features) : "default") << "\n\n";
  }

  out << "[lambda]\ngrid = " << join_doubles(c.lambda_grid) << "\n\n";

  std::vector<std::string> seeds;
  for (auto s : c.seeds) seeds.push_back(std::to_string(s));
  std::vector<std::string> ablation;
  for (auto k : c.fusion_ablation) ablation.push_back(to_string(k));
  out << "[run]\nseeds = " << join(seeds) << "\nnormalize_costs = " << (c.normalize_costs ? "true" : "false")
      << "\nallow_oracle = " << (c.allow_oracle ? "true" : "false")
      << "\nsingle_point_nauc = " << (c.single_point_nauc ? "true" : "false")
      << "\nnauc_ratio = " << (c.nauc_ratio ? "true" : "false")
      << "\nlog_x = " << (c.log_x ? "true" : "false")
      << "\nfusion_override = " << (c.fusion_override ? to_string(*c.fusion_override) : "none")
      << "\nfusion_ablation = " << join(ablation) << "\n\n";

  const WorkloadSpec& w = c.workload;
  out << "[workload]\nn = " << w.n << "\nd = " << w.d << "\nmodels = " << w.models
      << "\nclusters = " << w.clusters << "\nseparation = " << format_double(w.separation)
      << "\nsalience = " << format_double(w.salience)
      << "\nnoise_sigma = " << format_double(w.noise_sigma) << "\n";
  if (w.competence.size() > 0) {
    std::vector<std::string> rows;
    for (Eigen::Index i = 0; i < w.competence.rows(); ++i) {
      std::vector<double> row(w.competence.cols());
      for (Eigen::Index j = 0; j < w.competence.cols(); ++j) row[static_cast<std::size_t>(j)] = w.competence(i, j);
      rows.push_back(join_doubles(row));
    }
    out << "competence = " << join(rows, " | ") << "\n";
  }
  if (!w.cost_profile.empty()) out << "cost_profile = " << join_doubles(w.cost_profile) << "\n";
  if (!w.mixture.empty()) out << "mixture = " << join_doubles(w.mixture) << "\n";
  out << "continuous_utilities = " << (w.continuous_utilities ? "true" : "false")
      << "\ncontinuous_sd = " << format_double(w.continuous_sd)
      << "\ncost_jitter = " << format_double(w.cost_jitter) << "\ndatasets = " << join(w.datasets)
      << "\n";
  if (!w.scenarios.empty()) out << "scenarios = " << join(w.scenarios) << "\n";
  out << "seed = " << w.seed << "\n";
  if (c.shift) {
    out << "\n[shift]\n";
    if (!c.shift->mixture.empty()) out << "mixture = " << join_doubles(c.shift->mixture) << "\n";
    out << "rotation_angle = " << format_double(c.shift->rotation_angle) << "\nseed = " << c.shift->seed
        << "\n";
  }
  return out.str();
}

}  // namespace mmroute
