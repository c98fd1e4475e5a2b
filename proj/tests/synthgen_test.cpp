#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "mmroute/error.hpp"
#include "mmroute/evaluation.hpp"
#include "mmroute/fusion.hpp"
#include "mmroute/rng.hpp"
#include "mmroute/routers.hpp"
#include "mmroute/synthgen.hpp"

using namespace mmroute;

namespace {

std::vector<std::size_t> all_rows(const OutcomeTable& t) {
  std::vector<std::size_t> v(t.num_instances());
  std::iota(v.begin(), v.end(), 0);
  return v;
}

double nearest_centroid_accuracy(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids,
                                 const std::vector<std::size_t>& labels) {
  std::size_t hits = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    Eigen::Index best;
    (centroids * x.row(i).transpose()).maxCoeff(&best);
    hits += static_cast<std::size_t>(best) == labels[static_cast<std::size_t>(i)] ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(x.rows());
}

std::vector<double> ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return v[a] < v[b]; });
  std::vector<double> r(v.size());
  for (std::size_t k = 0; k < order.size();) {
    std::size_t e = k;
    while (e + 1 < order.size() && v[order[e + 1]] == v[order[k]]) ++e;
    for (std::size_t t = k; t <= e; ++t) r[order[t]] = 0.5 * static_cast<double>(k + e);
    k = e + 1;
  }
  return r;
}

double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const auto ra = ranks(a), rb = ranks(b);
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / static_cast<double>(ra.size());
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / static_cast<double>(rb.size());
  double num = 0, da = 0, db = 0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    num += (ra[i] - ma) * (rb[i] - mb);
    da += (ra[i] - ma) * (ra[i] - ma);
    db += (rb[i] - mb) * (rb[i] - mb);
  }
  return num / std::sqrt(da * db);
}

double knn_utility(const Workload& train, const Workload& test) {
  const auto xtr = unimodal_features(train.embeddings, Modality::image).z;
  const auto xte = unimodal_features(test.embeddings, Modality::image).z;
  RouterConfig cfg;
  cfg.kind = RouterKind::knn;
  cfg.neighbors = 10;
  const auto r = fit_knn(cfg, make_fit_input(xtr, train.table, all_rows(train.table)));
  return evaluate_policy(r->route(xte, 0.0), test.table.utilities(), test.table.costs()).mean_perf;
}

WorkloadSpec image_salient(std::uint64_t seed) {
  WorkloadSpec spec;
  spec.n = 1000;
  spec.d = 32;
  spec.salience = 1.0;
  spec.noise_sigma = 0.3;
  spec.seed = seed;
  return spec;
}

}  // namespace

TEST(Workload, DeterministicForSeed) {
  WorkloadSpec spec;
  spec.n = 200;
  spec.seed = 5;
  const auto a = gen_workload(spec), b = gen_workload(spec);
  EXPECT_TRUE(a.embeddings.text.cwiseEqual(b.embeddings.text).all());
  EXPECT_TRUE(a.embeddings.image.cwiseEqual(b.embeddings.image).all());
  EXPECT_EQ(format_outcomes(a.table), format_outcomes(b.table));
  EXPECT_EQ(a.labels, b.labels);
  spec.seed = 6;
  EXPECT_NE(format_outcomes(gen_workload(spec).table), format_outcomes(a.table));
}

TEST(Workload, ValuesInRange) {
  for (bool continuous : {false, true}) {
    WorkloadSpec spec;
    spec.n = 300;
    spec.continuous_utilities = continuous;
    spec.continuous_sd = 0.3;
    const auto w = gen_workload(spec);
    EXPECT_GE(w.table.utilities().minCoeff(), 0.0);
    EXPECT_LE(w.table.utilities().maxCoeff(), 1.0);
    EXPECT_GT(w.table.costs().minCoeff(), 0.0);
    EXPECT_TRUE(w.embeddings.normalized);
    EXPECT_EQ(w.embeddings.size(), 300u);
  }
}

TEST(Workload, DefaultsMatchReferencePool) {
  const auto profile = default_cost_profile(3);
  EXPECT_NEAR(profile[0], 10.0 / 15.0, 1e-15);
  EXPECT_DOUBLE_EQ(profile[2], 1.0);
  const auto comp = default_competence(4, 4);
  for (Eigen::Index c = 0; c < 4; ++c)
    for (Eigen::Index j = 0; j < 4; ++j) EXPECT_DOUBLE_EQ(comp(c, j), c == j ? 0.9 : 0.4);
  EXPECT_EQ(synthetic_pool(12).size(), 12u);
}

TEST(Workload, InvalidSpecsRejected) {
  WorkloadSpec spec;
  spec.salience = 1.5;
  EXPECT_THROW(validate(spec), ConfigError);
  spec = WorkloadSpec{};
  spec.mixture = {0.5, 0.5};  // four clusters by default
  EXPECT_THROW(validate(spec), ConfigError);
  spec = WorkloadSpec{};
  spec.competence = Eigen::MatrixXd::Constant(4, 4, 1.2);
  EXPECT_THROW(validate(spec), ConfigError);
  spec = WorkloadSpec{};
  spec.n = 0;
  EXPECT_THROW(validate(spec), ConfigError);
}

TEST(Workload, FullSalienceLeavesTextUninformative) {
  WorkloadSpec spec = image_salient(3);
  spec.n = 4000;
  const auto w = gen_workload(spec);
  EXPECT_NEAR(nearest_centroid_accuracy(w.embeddings.text, w.text_centroids, w.labels), 0.25, 0.05);
  EXPECT_GE(nearest_centroid_accuracy(w.embeddings.image, w.image_centroids, w.labels), 0.99);
}

TEST(Workload, SalienceOrdersModalityInformativeness) {
  std::vector<double> s_grid, gap;
  for (int k = 0; k <= 10; ++k) {
    WorkloadSpec spec;
    spec.n = 1500;
    spec.d = 32;
    spec.salience = k / 10.0;
    spec.seed = 40;
    const auto w = gen_workload(spec);
    s_grid.push_back(spec.salience);
    gap.push_back(nearest_centroid_accuracy(w.embeddings.image, w.image_centroids, w.labels) -
                  nearest_centroid_accuracy(w.embeddings.text, w.text_centroids, w.labels));
  }
  EXPECT_GT(spearman(s_grid, gap), 0.9);
}

TEST(Workload, IdentityCompetenceOracleIsPerfect) {
  WorkloadSpec spec;
  spec.n = 500;
  spec.competence = Eigen::MatrixXd::Identity(4, 4);
  const auto w = gen_workload(spec);
  EXPECT_DOUBLE_EQ(w.table.utilities().rowwise().maxCoeff().mean(), 1.0);
}

TEST(Workload, NoiselessClustersRecoveredByKMeans) {
  WorkloadSpec spec = image_salient(9);
  spec.noise_sigma = 0.0;
  const auto w = gen_workload(spec);
  Rng rng(1);
  const auto km = kmeans(w.embeddings.image, 4, rng);
  // Majority label per found cluster.
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(4, 4);
  for (std::size_t i = 0; i < w.labels.size(); ++i)
    ++counts(static_cast<Eigen::Index>(km.labels[i]), static_cast<Eigen::Index>(w.labels[i]));
  const double agree = counts.rowwise().maxCoeff().sum() / static_cast<double>(w.labels.size());
  EXPECT_GE(agree, 0.99);
}

TEST(Shift, ZeroShiftKeepsDistribution) {
  const auto base = image_salient(2);
  const auto spec = gen_shift(base, ShiftSpec{});
  const auto a = gen_workload(base), b = gen_workload(spec);
  EXPECT_TRUE(a.image_centroids.isApprox(b.image_centroids));
  EXPECT_EQ(a.competence, b.competence);
  // Fresh draws from the same distribution.
  EXPECT_FALSE(a.embeddings.image.isApprox(b.embeddings.image));
  EXPECT_NEAR(a.table.utilities().mean(), b.table.utilities().mean(), 0.03);
  EXPECT_NEAR(knn_utility(a, b), knn_utility(a, a), 0.05);
}

TEST(Shift, MixtureShiftStillBeatsBestSingle) {
  const auto base = image_salient(4);
  ShiftSpec shift;
  shift.mixture = {0.9, 0.1, 0.0, 0.0};
  const auto a = gen_workload(base), b = gen_workload(gen_shift(base, shift));
  const auto best = best_single_model(b.table, all_rows(b.table));
  EXPECT_GE(knn_utility(a, b), best.p_best);
}

TEST(Shift, QuarterTurnRotationDegradesRoutingTowardRandom) {
  // In two dimensions the rotation plane is the whole space, so every
  // centroid moves; in high dimensions a random plane barely touches them.
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    WorkloadSpec base = image_salient(seed);
    base.d = 2;
    base.noise_sigma = 0.05;
    ShiftSpec rotated;
    rotated.rotation_angle = std::numbers::pi / 2;
    const auto a = gen_workload(base);
    const double same = knn_utility(a, gen_workload(gen_shift(base, ShiftSpec{})));
    const auto b = gen_workload(gen_shift(base, rotated));
    const double rot = knn_utility(a, b);
    const double random = b.table.utilities().mean();
    EXPECT_LT(std::abs(rot - random), same - rot) << "seed " << seed;
  }
}

TEST(OracleFrontier, ZeroLambdaReachesRowMaxima) {
  WorkloadSpec spec;
  spec.n = 300;
  spec.continuous_utilities = true;
  const auto w = gen_workload(spec);
  const std::vector<double> zero{0.0};
  const auto f = oracle_frontier(w.table, all_rows(w.table), zero);
  ASSERT_EQ(f.points.size(), 1u);
  EXPECT_NEAR(f.points[0].perf, w.table.utilities().rowwise().maxCoeff().mean(), 1e-12);

  const auto grid = default_lambda_grid();
  const auto full = oracle_frontier(w.table, all_rows(w.table), grid);
  EXPECT_NEAR(full.points.back().perf, f.points[0].perf, 1e-12);
  for (std::size_t k = 1; k < full.points.size(); ++k)
    EXPECT_LT(full.points[k - 1].cost, full.points[k].cost);
}
