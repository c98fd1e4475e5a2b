#include "mmroute/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mmroute/error.hpp"

namespace mmroute {

namespace {

constexpr std::uint64_t kCentroidStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kRotationStream = 3;

Eigen::VectorXd random_unit(Rng& rng, std::size_t d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  do {
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
  } while (v.norm() == 0.0);
  return v / v.norm();
}

Eigen::VectorXd gaussian(Rng& rng, std::size_t d) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(d));
  for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = rng.normal();
  return v;
}

std::size_t draw_category(Rng& rng, const std::vector<double>& weights, double total) {
  const double target = rng.uniform() * total;
  double cumulative = 0.0;
  for (std::size_t c = 0; c < weights.size(); ++c) {
    cumulative += weights[c];
    if (target < cumulative) return c;
  }
  for (std::size_t c = weights.size(); c-- > 0;)
    if (weights[c] > 0.0) return c;
  return 0;
}

// Rotation by `angle` in the plane spanned by orthonormal a, b.
void rotate_rows(Eigen::MatrixXd& m, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                 double angle) {
  const double cs = std::cos(angle), sn = std::sin(angle);
  const Eigen::VectorXd pa = m * a;
  const Eigen::VectorXd pb = m * b;
  m += (cs - 1.0) * (pa * a.transpose() + pb * b.transpose()) +
       sn * (pa * b.transpose() - pb * a.transpose());
}

}  // namespace

Eigen::MatrixXd default_competence(std::size_t clusters, std::size_t models) {
  Eigen::MatrixXd c = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(clusters),
                                                static_cast<Eigen::Index>(models), 0.4);
  for (std::size_t k = 0; k < clusters; ++k)
    c(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k % models)) = 0.9;
  return c;
}

std::vector<ModelMeta> synthetic_pool(std::size_t models) {
  const auto& ref = reference_pool();
  std::vector<ModelMeta> pool;
  for (std::size_t j = 0; j < models; ++j) {
    if (j < ref.size()) {
      pool.push_back(ref[j]);
      continue;
    }
    ModelMeta m = ref[j % ref.size()];
    char id[32];
    std::snprintf(id, sizeof id, "model-%03zu", j);
    m.model_id = id;
    m.display_name = id;
    pool.push_back(m);
  }
  return pool;
}

std::vector<double> default_cost_profile(std::size_t models) {
  std::vector<double> raw;
  for (const auto& m : synthetic_pool(models)) raw.push_back(m.price_per_million_output_tokens);
  return normalize_costs(raw);
}

void validate(const WorkloadSpec& spec) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw ConfigError("workload: " + what);
  };
  require(spec.n >= 1, "n must be positive");
  require(spec.d >= 2, "d must be at least 2");
  require(spec.models >= 1, "need at least one model");
  require(spec.clusters >= 1, "need at least one cluster");
  require(spec.clusters <= spec.n, "more clusters than instances");
  require(spec.salience >= 0.0 && spec.salience <= 1.0, "salience must lie in [0,1]");
  require(spec.noise_sigma >= 0.0, "noise_sigma must be nonnegative");
  require(spec.separation >= 0.0, "separation must be nonnegative");
  require(spec.cost_jitter >= 0.0 && spec.cost_jitter < 1.0, "cost_jitter must lie in [0,1)");
  require(spec.continuous_sd >= 0.0, "continuous_sd must be nonnegative");
  require(!spec.datasets.empty(), "need at least one dataset tag");
  require(spec.scenarios.empty() || spec.scenarios.size() == spec.datasets.size(),
          "scenarios must match datasets one to one");
  if (spec.competence.size() > 0) {
    require(static_cast<std::size_t>(spec.competence.rows()) == spec.clusters &&
                static_cast<std::size_t>(spec.competence.cols()) == spec.models,
            "competence must be clusters x models");
    require((spec.competence.array() >= 0.0).all() && (spec.competence.array() <= 1.0).all(),
            "competence entries must lie in [0,1]");
  }
  if (!spec.cost_profile.empty()) {
    require(spec.cost_profile.size() == spec.models, "cost_profile must have one entry per model");
    for (double c : spec.cost_profile) require(c > 0.0 && std::isfinite(c), "costs must be positive");
  }
  if (!spec.mixture.empty()) {
    require(spec.mixture.size() == spec.clusters, "mixture must have one weight per cluster");
    double total = 0.0;
    for (double w : spec.mixture) {
      require(w >= 0.0 && std::isfinite(w), "mixture weights must be nonnegative");
      total += w;
    }
    require(total > 0.0, "mixture weights sum to zero");
  }
}

Workload gen_workload(const WorkloadSpec& spec) {
  validate(spec);
  const std::size_t n = spec.n, d = spec.d, k = spec.models, clusters = spec.clusters;
  const Eigen::MatrixXd competence =
      spec.competence.size() > 0 ? spec.competence : default_competence(clusters, k);
  const std::vector<double> profile =
      spec.cost_profile.empty() ? default_cost_profile(k) : spec.cost_profile;
  const std::vector<double> mixture =
      spec.mixture.empty() ? std::vector<double>(clusters, 1.0) : spec.mixture;
  double mixture_total = 0.0;
  for (double w : mixture) mixture_total += w;

  Rng centroid_rng(derive_seed(spec.seed, kCentroidStream));
  Eigen::MatrixXd text_centroids(static_cast<Eigen::Index>(clusters), static_cast<Eigen::Index>(d));
  Eigen::MatrixXd image_centroids(static_cast<Eigen::Index>(clusters), static_cast<Eigen::Index>(d));
  for (std::size_t c = 0; c < clusters; ++c)
    text_centroids.row(static_cast<Eigen::Index>(c)) = random_unit(centroid_rng, d).transpose();
  for (std::size_t c = 0; c < clusters; ++c)
    image_centroids.row(static_cast<Eigen::Index>(c)) = random_unit(centroid_rng, d).transpose();

  Rng rng(derive_seed(spec.sample_seed.value_or(spec.seed), kSampleStream));
  const double s = spec.salience;
  const double noise_scale = spec.noise_sigma / std::sqrt(static_cast<double>(d));
  Eigen::MatrixXd text(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::MatrixXd image(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Eigen::MatrixXd u(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  Eigen::MatrixXd cost(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  std::vector<std::size_t> labels(n);
  std::vector<Instance> instances(n);

  for (std::size_t i = 0; i < n; ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const std::size_t c = draw_category(rng, mixture, mixture_total);
    labels[i] = c;
    const auto cr = static_cast<Eigen::Index>(c);

    const Eigen::VectorXd r_img = random_unit(rng, d);
    const Eigen::VectorXd r_txt = random_unit(rng, d);
    Eigen::VectorXd xi = spec.separation * (s * image_centroids.row(cr).transpose() + (1.0 - s) * r_img) +
                         noise_scale * gaussian(rng, d);
    Eigen::VectorXd xt =
        spec.separation * ((1.0 - s) * text_centroids.row(cr).transpose() + s * r_txt) +
        noise_scale * gaussian(rng, d);
    image.row(row) = xi.transpose();
    text.row(row) = xt.transpose();

    for (std::size_t j = 0; j < k; ++j) {
      const auto col = static_cast<Eigen::Index>(j);
      const double p = competence(cr, col);
      u(row, col) = spec.continuous_utilities
                        ? std::clamp(p + spec.continuous_sd * rng.normal(), 0.0, 1.0)
                        : (rng.bernoulli(p) ? 1.0 : 0.0);
      cost(row, col) = profile[j] * (1.0 + rng.uniform(-spec.cost_jitter, spec.cost_jitter));
    }

    char id[32];
    std::snprintf(id, sizeof id, "syn-%07zu", i);
    Instance& inst = instances[i];
    inst.instance_id = id;
    const std::size_t ds = i % spec.datasets.size();
    inst.dataset = spec.datasets[ds];
    inst.scenario = spec.scenarios.empty() ? "general_vqa" : spec.scenarios[ds];
  }

  if (spec.rotation_angle != 0.0) {
    Rng rot(derive_seed(spec.rotation_seed, kRotationStream));
    const Eigen::VectorXd a = random_unit(rot, d);
    Eigen::VectorXd b = gaussian(rot, d);
    b -= b.dot(a) * a;
    b.normalize();
    rotate_rows(text, a, b, spec.rotation_angle);
    rotate_rows(image, a, b, spec.rotation_angle);
  }

  for (Eigen::Index i = 0; i < text.rows(); ++i) {
    const double nt = text.row(i).norm(), ni = image.row(i).norm();
    if (nt > 0.0) text.row(i) /= nt;
    if (ni > 0.0) image.row(i) /= ni;
  }

  Workload w{make_embedding_set(std::move(text), std::move(image)),
             OutcomeTable(synthetic_pool(k), std::move(instances), std::move(u), std::move(cost)),
             std::move(labels),
             competence,
             std::move(text_centroids),
             std::move(image_centroids)};
  return w;
}

WorkloadSpec gen_shift(const WorkloadSpec& base, const ShiftSpec& shift) {
  WorkloadSpec out = base;
  if (!shift.mixture.empty()) out.mixture = shift.mixture;
  out.sample_seed = derive_seed(base.sample_seed.value_or(base.seed), shift.seed);
  out.rotation_angle = shift.rotation_angle;
  out.rotation_seed = shift.seed;
  validate(out);
  return out;
}

Frontier oracle_frontier(const OutcomeTable& table, std::span<const std::size_t> rows,
                         std::span<const double> grid) {
  const Eigen::MatrixXd u = table.utility_rows(rows);
  const Eigen::MatrixXd c = table.cost_rows(rows);
  if (u.array().isNaN().any() || c.array().isNaN().any())
    throw ValidationError("oracle frontier needs fully observed outcomes");
  RouterConfig cfg;
  cfg.kind = RouterKind::oracle;
  cfg.cost_aware = true;
  const auto oracle = fit_oracle(cfg, 1, u, c, true);
  const Eigen::MatrixXd dummy = Eigen::MatrixXd::Zero(u.rows(), 1);
  const auto points = sweep_lambda(*oracle, dummy, table, rows, grid);
  return pareto_envelope(std::span<const OperatingPoint>(points));
}

}  // namespace mmroute
