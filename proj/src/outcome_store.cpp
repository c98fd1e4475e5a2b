#include "mmroute/outcome_store.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "mmroute/error.hpp"
#include "mmroute/rng.hpp"
#include "mmroute/text_io.hpp"

namespace mmroute {

namespace {

std::string cell_name(const std::string& instance_id, const std::string& model_id) {
  return "(" + instance_id + ", " + model_id + ")";
}

}  // namespace

// ---- OutcomeTable ----------------------------------------------------------

OutcomeTable::OutcomeTable(std::vector<ModelMeta> models, std::vector<Instance> instances,
                           Eigen::MatrixXd utilities, Eigen::MatrixXd costs)
    : models_(std::move(models)),
      instances_(std::move(instances)),
      utilities_(std::move(utilities)),
      costs_(std::move(costs)) {
  validate_pool(models_);
  const auto n = static_cast<Eigen::Index>(instances_.size());
  const auto k = static_cast<Eigen::Index>(models_.size());
  if (utilities_.rows() != n || utilities_.cols() != k || costs_.rows() != n ||
      costs_.cols() != k) {
    std::ostringstream msg;
    msg << "outcome matrices must be " << n << "x" << k << ", got utilities "
        << utilities_.rows() << "x" << utilities_.cols() << " and costs " << costs_.rows()
        << "x" << costs_.cols();
    throw ValidationError(msg.str());
  }
  std::unordered_set<std::string> seen;
  for (const auto& inst : instances_) {
    if (!seen.insert(inst.instance_id).second)
      throw ValidationError("duplicate instance_id " + inst.instance_id);
    if (!inst.mask.text && !inst.mask.image)
      throw ValidationError("instance " + inst.instance_id + " has no available modality");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      const double u = utilities_(i, j);
      const double c = costs_(i, j);
      const auto& iid = instances_[static_cast<std::size_t>(i)].instance_id;
      const auto& mid = models_[static_cast<std::size_t>(j)].model_id;
      if (!is_missing(u) && !(u >= 0.0 && u <= 1.0))
        throw ValidationError("utility " + format_double(u) + " outside [0,1] at " +
                              cell_name(iid, mid));
      if (!is_missing(c) && !(c >= 0.0 && std::isfinite(c)))
        throw ValidationError("cost " + format_double(c) + " is negative or non-finite at " +
                              cell_name(iid, mid));
    }
  }
}

std::optional<std::size_t> OutcomeTable::model_index(const std::string& model_id) const {
  for (std::size_t j = 0; j < models_.size(); ++j)
    if (models_[j].model_id == model_id) return j;
  return std::nullopt;
}

std::optional<std::size_t> OutcomeTable::instance_index(const std::string& instance_id) const {
  const auto it = std::lower_bound(
      instances_.begin(), instances_.end(), instance_id,
      [](const Instance& a, const std::string& id) { return a.instance_id < id; });
  if (it != instances_.end() && it->instance_id == instance_id)
    return static_cast<std::size_t>(it - instances_.begin());
  // Tables built in memory need not be sorted.
  for (std::size_t i = 0; i < instances_.size(); ++i)
    if (instances_[i].instance_id == instance_id) return i;
  return std::nullopt;
}

std::vector<std::string> OutcomeTable::datasets() const {
  std::set<std::string> names;
  for (const auto& inst : instances_) names.insert(inst.dataset);
  return {names.begin(), names.end()};
}

std::map<std::string, std::string> OutcomeTable::dataset_scenarios() const {
  std::map<std::string, std::string> out;
  for (const auto& inst : instances_) out.emplace(inst.dataset, inst.scenario);
  return out;
}

std::vector<std::size_t> OutcomeTable::rows_in_dataset(std::span<const std::size_t> rows,
                                                       const std::string& dataset) const {
  std::vector<std::size_t> out;
  for (auto r : rows)
    if (instances_[r].dataset == dataset) out.push_back(r);
  return out;
}

Eigen::MatrixXd OutcomeTable::utility_rows(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), utilities_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = utilities_.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

Eigen::MatrixXd OutcomeTable::cost_rows(std::span<const std::size_t> rows) const {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), costs_.cols());
  for (std::size_t r = 0; r < rows.size(); ++r)
    out.row(static_cast<Eigen::Index>(r)) = costs_.row(static_cast<Eigen::Index>(rows[r]));
  return out;
}

OutcomeTable OutcomeTable::with_costs(Eigen::MatrixXd costs) const {
  return OutcomeTable(models_, instances_, utilities_, std::move(costs));
}

// ---- model pool ------------------------------------------------------------

namespace {

ModelMeta pool_entry(std::string id, std::string name, Tier tier, double price) {
  ModelMeta m;
  m.model_id = std::move(id);
  m.display_name = std::move(name);
  m.tier = tier;
  m.price_per_million_output_tokens = price;
  return m;
}

const char* tier_name(Tier t) { return t == Tier::commercial ? "commercial" : "open_weight"; }

}  // namespace

const std::vector<ModelMeta>& reference_pool() {
  static const std::vector<ModelMeta> pool = {
      pool_entry("gpt-5-0807", "GPT-5-0807", Tier::commercial, 10.00),
      pool_entry("gemini-2.5-pro", "Gemini 2.5 Pro", Tier::commercial, 5.00),
      pool_entry("claude-3.7-sonnet", "Claude 3.7 Sonnet", Tier::commercial, 15.00),
      pool_entry("gemini-2.5-flash", "Gemini 2.5 Flash", Tier::commercial, 2.00),
      pool_entry("gpt-5-nano-0807", "GPT-5-Nano-0807", Tier::commercial, 0.50),
      pool_entry("internvl3-78b", "InternVL3-78B", Tier::open_weight, 0.70),
      pool_entry("qwen2.5-vl-72b", "Qwen2.5-VL-72B", Tier::open_weight, 0.65),
      pool_entry("qwen2.5-vl-7b", "Qwen2.5-VL-7B", Tier::open_weight, 0.07),
      pool_entry("gemma3-4b", "Gemma3-4B", Tier::open_weight, 0.04),
      pool_entry("qwen2.5-vl-3b", "Qwen2.5-VL-3B", Tier::open_weight, 0.03),
  };
  return pool;
}

void validate_pool(std::span<const ModelMeta> pool) {
  std::unordered_set<std::string> ids;
  for (const auto& m : pool) {
    if (m.model_id.empty()) throw ValidationError("model with empty model_id");
    if (!ids.insert(m.model_id).second)
      throw ValidationError("duplicate model_id " + m.model_id);
    if (!(m.price_per_million_output_tokens >= 0.0))
      throw ValidationError("negative price for model " + m.model_id);
    if (m.context_length && *m.context_length <= 0)
      throw ValidationError("non-positive context_length for model " + m.model_id);
  }
}

std::vector<ModelMeta> load_model_pool(const std::filesystem::path& path) {
  const std::string contents = read_file(path);
  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  std::vector<ModelMeta> pool;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      if (text != "model_id,display_name,tier,price_per_million_output_tokens,context_length,"
                  "modalities")
        throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                              ": unexpected model pool header");
      continue;
    }
    const auto fields = split_fields(text);
    auto fail = [&](const std::string& what) {
      throw ValidationError(path.string() + " line " + std::to_string(line_no) + ": " + what);
    };
    if (fields.size() != 6) fail("expected 6 fields, got " + std::to_string(fields.size()));
    ModelMeta m;
    m.model_id = std::string(trim(fields[0]));
    m.display_name = std::string(trim(fields[1]));
    const auto tier = trim(fields[2]);
    if (tier == "commercial") m.tier = Tier::commercial;
    else if (tier == "open_weight") m.tier = Tier::open_weight;
    else fail("tier must be commercial or open_weight");
    const auto price = parse_double(fields[3]);
    if (!price || *price < 0.0) fail("price must be a nonnegative decimal");
    m.price_per_million_output_tokens = *price;
    if (!trim(fields[4]).empty()) {
      const auto ctx = parse_int(fields[4]);
      if (!ctx || *ctx <= 0) fail("context_length must be a positive integer");
      m.context_length = *ctx;
    }
    m.supports_text = m.supports_image = false;
    for (auto mod : split_fields(trim(fields[5]), '+')) {
      mod = trim(mod);
      if (mod == "text") m.supports_text = true;
      else if (mod == "image") m.supports_image = true;
      else fail("unknown modality '" + std::string(mod) + "'");
    }
    pool.push_back(std::move(m));
  }
  if (!header_seen) throw ValidationError(path.string() + ": empty model pool file");
  validate_pool(pool);
  return pool;
}

void write_model_pool(std::span<const ModelMeta> pool, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "model_id,display_name,tier,price_per_million_output_tokens,context_length,modalities\n";
  for (const auto& m : pool) {
    std::string mods;
    if (m.supports_text) mods = "text";
    if (m.supports_image) mods += mods.empty() ? "image" : "+image";
    out << m.model_id << ',' << m.display_name << ',' << tier_name(m.tier) << ','
        << format_double(m.price_per_million_output_tokens) << ','
        << (m.context_length ? std::to_string(*m.context_length) : "") << ',' << mods << '\n';
  }
  write_file(path, out.str());
}

// ---- outcome file ------------------------------------------------------------

OutcomeTable parse_outcomes(const std::string& contents, std::span<const ModelMeta> pool) {
  validate_pool(pool);
  std::unordered_map<std::string, std::size_t> model_col;
  for (std::size_t j = 0; j < pool.size(); ++j) model_col.emplace(pool[j].model_id, j);

  struct Cell {
    std::size_t model;
    double utility;
    double cost;
  };
  struct Pending {
    Instance inst;
    std::size_t first_line = 0;
    std::vector<Cell> cells;
  };
  std::map<std::string, Pending> by_id;

  std::istringstream in(contents);
  std::string line;
  std::size_t line_no = 0;
  std::size_t row_no = 0;  // data rows, header excluded
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) continue;
    if (header_seen) ++row_no;
    auto fail = [&](const std::string& what) {
      if (!header_seen) throw ValidationError("line " + std::to_string(line_no) + ": " + what);
      throw ValidationError("row " + std::to_string(row_no) + " (line " + std::to_string(line_no) +
                            "): " + what);
    };
    if (!header_seen) {
      header_seen = true;
      if (text != kOutcomeHeader) fail(std::string("expected header '") + kOutcomeHeader + "'");
      continue;
    }
    const auto f = split_fields(text);
    if (f.size() != 8) fail("expected 8 fields, got " + std::to_string(f.size()));
    const std::string iid(trim(f[0]));
    const std::string mid(trim(f[5]));
    if (iid.empty()) fail("empty instance_id");
    const auto col = model_col.find(mid);
    if (col == model_col.end()) fail("model_id '" + mid + "' is not in the model pool");

    auto bit = [&](std::string_view s, const char* name) {
      s = trim(s);
      if (s == "0") return false;
      if (s == "1") return true;
      fail(std::string(name) + " must be 0 or 1");
      return false;
    };
    Instance inst;
    inst.instance_id = iid;
    inst.dataset = std::string(trim(f[1]));
    inst.scenario = std::string(trim(f[2]));
    inst.mask.text = bit(f[3], "m_text");
    inst.mask.image = bit(f[4], "m_img");
    if (!inst.mask.text && !inst.mask.image) fail("instance " + iid + " has m_text=m_img=0");

    double u = kMissing;
    if (!trim(f[6]).empty()) {
      const auto v = parse_double(f[6]);
      if (!v) fail("unparseable utility '" + std::string(trim(f[6])) + "' at " + cell_name(iid, mid));
      if (!(*v >= 0.0 && *v <= 1.0))
        fail("utility " + std::string(trim(f[6])) + " outside [0,1] at " + cell_name(iid, mid));
      u = *v;
    }
    double c = kMissing;
    if (!trim(f[7]).empty()) {
      const auto v = parse_double(f[7]);
      if (!v) fail("unparseable cost '" + std::string(trim(f[7])) + "' at " + cell_name(iid, mid));
      if (!(*v >= 0.0) || !std::isfinite(*v))
        fail("cost " + std::string(trim(f[7])) + " is negative at " + cell_name(iid, mid));
      c = *v;
    }

    auto [it, inserted] = by_id.try_emplace(iid);
    Pending& p = it->second;
    if (inserted) {
      p.inst = inst;
      p.first_line = line_no;
    } else if (p.inst.dataset != inst.dataset || p.inst.scenario != inst.scenario ||
               p.inst.mask.text != inst.mask.text || p.inst.mask.image != inst.mask.image) {
      fail("instance " + iid + " metadata disagrees with line " + std::to_string(p.first_line));
    }
    for (const auto& cell : p.cells)
      if (cell.model == col->second) fail("duplicate row for " + cell_name(iid, mid));
    p.cells.push_back({col->second, u, c});
  }
  if (!header_seen) throw ValidationError("empty outcome file");

  const auto n = static_cast<Eigen::Index>(by_id.size());
  const auto k = static_cast<Eigen::Index>(pool.size());
  Eigen::MatrixXd utilities = Eigen::MatrixXd::Constant(n, k, kMissing);
  Eigen::MatrixXd costs = Eigen::MatrixXd::Constant(n, k, kMissing);
  std::vector<Instance> instances;
  instances.reserve(by_id.size());
  Eigen::Index i = 0;
  for (auto& [id, p] : by_id) {  // std::map iterates in sorted instance_id order
    for (const auto& cell : p.cells) {
      utilities(i, static_cast<Eigen::Index>(cell.model)) = cell.utility;
      costs(i, static_cast<Eigen::Index>(cell.model)) = cell.cost;
    }
    instances.push_back(std::move(p.inst));
    ++i;
  }
  return OutcomeTable({pool.begin(), pool.end()}, std::move(instances), std::move(utilities),
                      std::move(costs));
}

OutcomeTable load_outcomes(const std::filesystem::path& path, std::span<const ModelMeta> pool) {
  try {
    return parse_outcomes(read_file(path), pool);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string format_outcomes(const OutcomeTable& table) {
  std::ostringstream out;
  out << kOutcomeHeader << '\n';
  for (std::size_t i = 0; i < table.num_instances(); ++i) {
    const auto& inst = table.instances()[i];
    for (std::size_t j = 0; j < table.num_models(); ++j) {
      const double u = table.utility(i, j);
      const double c = table.cost(i, j);
      if (is_missing(u) && is_missing(c)) continue;
      out << inst.instance_id << ',' << inst.dataset << ',' << inst.scenario << ','
          << (inst.mask.text ? 1 : 0) << ',' << (inst.mask.image ? 1 : 0) << ','
          << table.models()[j].model_id << ',' << (is_missing(u) ? "" : format_double(u)) << ','
          << (is_missing(c) ? "" : format_double(c)) << '\n';
    }
  }
  return out.str();
}

void write_outcomes(const OutcomeTable& table, const std::filesystem::path& path) {
  write_file(path, format_outcomes(table));
}

// ---- costs ---------------------------------------------------------------------

std::vector<double> normalize_costs(std::span<const double> raw) {
  if (raw.empty()) throw ValidationError("cannot normalize an empty cost vector");
  double top = 0.0;
  for (double c : raw) {
    if (!(c >= 0.0) || !std::isfinite(c))
      throw ValidationError("raw costs must be finite and nonnegative");
    top = std::max(top, c);
  }
  if (top <= 0.0) throw ValidationError("cannot normalize an all-zero cost vector");
  std::vector<double> out(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) out[i] = raw[i] == top ? 1.0 : raw[i] / top;
  return out;
}

double token_cost(long long output_tokens, double price_per_million) {
  return static_cast<double>(output_tokens) * price_per_million / 1e6;
}

double instance_cost(const TokenCounts& tokens, const ModelMeta& model) {
  double total = 0.0;
  if (const auto it = tokens.output_tokens.find(model.model_id); it != tokens.output_tokens.end())
    total += token_cost(it->second, model.price_per_million_output_tokens);
  if (model.price_per_million_input_tokens)
    total += token_cost(tokens.input_tokens, *model.price_per_million_input_tokens);
  if (model.price_per_million_image_tokens)
    total += token_cost(tokens.image_tokens, *model.price_per_million_image_tokens);
  return total;
}

OutcomeTable normalize_table_costs(const OutcomeTable& table) {
  const auto& costs = table.costs();
  std::vector<double> means;
  for (Eigen::Index j = 0; j < costs.cols(); ++j) {
    double sum = 0.0;
    std::size_t count = 0;
    for (Eigen::Index i = 0; i < costs.rows(); ++i) {
      if (is_missing(costs(i, j))) continue;
      sum += costs(i, j);
      ++count;
    }
    if (count > 0) means.push_back(sum / static_cast<double>(count));
  }
  const auto normalized = normalize_costs(means);
  // Recover the common scale from any model with nonzero mean.
  double scale = 0.0;
  for (std::size_t j = 0; j < means.size(); ++j)
    if (means[j] > 0.0) {
      scale = normalized[j] / means[j];
      break;
    }
  return table.with_costs(costs * scale);
}

// ---- splits ------------------------------------------------------------------------

namespace {

// Largest-remainder apportionment of `total` across strata with the given
// sizes and a common fraction. Ties on the remainder go to the earlier stratum.
std::vector<std::size_t> apportion(const std::vector<std::size_t>& sizes, double fraction,
                                   std::size_t total) {
  std::vector<std::size_t> quota(sizes.size());
  std::vector<double> rem(sizes.size());
  std::size_t assigned = 0;
  for (std::size_t s = 0; s < sizes.size(); ++s) {
    const double exact = static_cast<double>(sizes[s]) * fraction;
    quota[s] = std::min(sizes[s], static_cast<std::size_t>(std::floor(exact)));
    rem[s] = exact - static_cast<double>(quota[s]);
    assigned += quota[s];
  }
  std::vector<std::size_t> order(sizes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  while (assigned < total) {
    bool progressed = false;
    for (auto s : order) {
      if (assigned == total) break;
      if (quota[s] < sizes[s]) {
        ++quota[s];
        ++assigned;
        progressed = true;
      }
    }
    if (!progressed) break;
  }
  while (assigned > total) {
    for (auto it = order.rbegin(); it != order.rend() && assigned > total; ++it)
      if (quota[*it] > 0) {
        --quota[*it];
        --assigned;
      }
  }
  return quota;
}

}  // namespace

SplitSpec make_splits(const OutcomeTable& table, double train_fraction,
                      double val_fraction_of_train, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("train_fraction must lie in (0, 1)");
  if (!(val_fraction_of_train >= 0.0 && val_fraction_of_train < 1.0))
    throw ConfigError("val_fraction_of_train must lie in [0, 1)");

  const auto datasets = table.datasets();
  std::vector<std::vector<std::size_t>> strata(datasets.size());
  for (std::size_t i = 0; i < table.num_instances(); ++i) {
    const auto pos = std::lower_bound(datasets.begin(), datasets.end(),
                                      table.instances()[i].dataset) - datasets.begin();
    strata[static_cast<std::size_t>(pos)].push_back(i);
  }

  Rng rng(seed);
  std::vector<std::size_t> sizes;
  for (auto& s : strata) {
    rng.shuffle(s);
    sizes.push_back(s.size());
  }
  const auto n = table.num_instances();
  const auto pool_total =
      static_cast<std::size_t>(std::llround(static_cast<double>(n) * train_fraction));
  const auto pool_quota = apportion(sizes, train_fraction, pool_total);
  const auto val_total = static_cast<std::size_t>(
      std::llround(static_cast<double>(pool_total) * val_fraction_of_train));
  const auto val_quota = apportion(pool_quota, val_fraction_of_train, val_total);

  SplitSpec split;
  split.seed = seed;
  split.train_fraction = train_fraction;
  split.val_fraction_of_train = val_fraction_of_train;
  for (std::size_t s = 0; s < strata.size(); ++s) {
    for (std::size_t r = 0; r < strata[s].size(); ++r) {
      if (r < val_quota[s]) split.val.push_back(strata[s][r]);
      else if (r < pool_quota[s]) split.train.push_back(strata[s][r]);
      else split.test.push_back(strata[s][r]);
    }
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.val.begin(), split.val.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

std::string format_split(const SplitSpec& split, const OutcomeTable& table) {
  auto ids = [&](const std::vector<std::size_t>& rows) {
    nlohmann::json arr = nlohmann::json::array();
    for (auto r : rows) arr.push_back(table.instances()[r].instance_id);
    return arr;
  };
  nlohmann::ordered_json j;
  j["seed"] = split.seed;
  j["train_fraction"] = split.train_fraction;
  j["val_fraction_of_train"] = split.val_fraction_of_train;
  j["train"] = ids(split.train);
  j["val"] = ids(split.val);
  j["test"] = ids(split.test);
  return j.dump(1) + "\n";
}

SplitSpec parse_split(const std::string& contents, const OutcomeTable& table) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(contents);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed split file: ") + e.what());
  }
  SplitSpec split;
  try {
    split.seed = j.at("seed").get<std::uint64_t>();
    split.train_fraction = j.at("train_fraction").get<double>();
    split.val_fraction_of_train = j.at("val_fraction_of_train").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed split file: ") + e.what());
  }
  std::vector<char> used(table.num_instances(), 0);
  auto rows = [&](const char* key) {
    std::vector<std::size_t> out;
    for (const auto& id : j.at(key)) {
      const auto idx = table.instance_index(id.get<std::string>());
      if (!idx) throw ValidationError("split references unknown instance " + id.get<std::string>());
      if (used[*idx]++) throw ValidationError("split lists instance twice: " + id.get<std::string>());
      out.push_back(*idx);
    }
    std::sort(out.begin(), out.end());
    return out;
  };
  split.train = rows("train");
  split.val = rows("val");
  split.test = rows("test");
  if (std::find(used.begin(), used.end(), 0) != used.end())
    throw ValidationError("split does not cover every instance");
  return split;
}

const std::vector<std::size_t>& split_rows(const SplitSpec& split, SplitPart part) {
  switch (part) {
    case SplitPart::train: return split.train;
    case SplitPart::val: return split.val;
    case SplitPart::test: break;
  }
  return split.test;
}

// ---- single-model references --------------------------------------------------------

std::vector<SingleModelPoint> single_model_points(const OutcomeTable& table,
                                                  std::span<const std::size_t> rows) {
  std::vector<SingleModelPoint> out;
  if (rows.empty()) return out;
  for (std::size_t j = 0; j < table.num_models(); ++j) {
    double su = 0.0, sc = 0.0;
    bool full = true;
    for (auto r : rows) {
      if (!table.observed(r, j)) {
        full = false;
        break;
      }
      su += table.utility(r, j);
      sc += table.cost(r, j);
    }
    if (!full) continue;
    const double n = static_cast<double>(rows.size());
    out.push_back({j, sc / n, su / n});
  }
  return out;
}

BestSingleModel best_single_model(const OutcomeTable& table, std::span<const std::size_t> rows) {
  const auto points = single_model_points(table, rows);
  if (points.empty())
    throw ValidationError("no model column is fully observed on the evaluation rows");
  const SingleModelPoint* best = &points.front();
  double c_min = points.front().mean_cost;
  double c_max = points.front().mean_cost;
  for (const auto& p : points) {
    if (p.mean_perf > best->mean_perf ||
        (p.mean_perf == best->mean_perf && p.mean_cost < best->mean_cost))
      best = &p;
    c_min = std::min(c_min, p.mean_cost);
    c_max = std::max(c_max, p.mean_cost);
  }
  BestSingleModel out;
  out.model = best->model;
  out.model_id = table.models()[best->model].model_id;
  out.p_best = best->mean_perf;
  out.c_best = best->mean_cost;
  out.c_min = c_min;
  out.c_max = c_max;
  return out;
}

BestSingleModel best_single_model(const OutcomeTable& table, const SplitSpec& split,
                                  SplitPart which) {
  return best_single_model(table, split_rows(split, which));
}

}  // namespace mmroute
