#include <algorithm>
#include <cmath>
#include <limits>

#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

namespace {

constexpr std::uint64_t kKMeansStream = 0x6b6d65616e73ULL;

std::vector<std::size_t> assign_all(const Eigen::MatrixXd& x, const Eigen::MatrixXd& centroids) {
  std::vector<std::size_t> labels(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    labels[static_cast<std::size_t>(i)] = nearest_centroid(centroids, x.row(i));
  return labels;
}

Eigen::MatrixXd seed_plus_plus(const Eigen::MatrixXd& x, std::size_t clusters, Rng& rng) {
  const auto n = static_cast<std::size_t>(x.rows());
  Eigen::MatrixXd centroids(static_cast<Eigen::Index>(clusters), x.cols());
  std::size_t first = static_cast<std::size_t>(rng.below(n));
  centroids.row(0) = x.row(static_cast<Eigen::Index>(first));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i)
    d2[i] = (x.row(static_cast<Eigen::Index>(i)) - centroids.row(0)).squaredNorm();

  for (std::size_t c = 1; c < clusters; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = n;
    if (total > 0.0) {
      const double target = rng.uniform() * total;
      double cumulative = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        cumulative += d2[i];
        if (cumulative > target) {
          pick = i;
          break;
        }
      }
      if (pick == n)  // rounding at the top end
        for (std::size_t i = n; i-- > 0;)
          if (d2[i] > 0.0) {
            pick = i;
            break;
          }
    } else {
      pick = static_cast<std::size_t>(rng.below(n));
    }
    centroids.row(static_cast<Eigen::Index>(c)) = x.row(static_cast<Eigen::Index>(pick));
    for (std::size_t i = 0; i < n; ++i)
      d2[i] = std::min(
          d2[i],
          (x.row(static_cast<Eigen::Index>(i)) - centroids.row(static_cast<Eigen::Index>(c)))
              .squaredNorm());
  }
  return centroids;
}

}  // namespace

std::size_t nearest_centroid(const Eigen::MatrixXd& centroids,
                             const Eigen::Ref<const Eigen::RowVectorXd>& point) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - point).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  return best;
}

KMeansResult kmeans(const Eigen::MatrixXd& x, std::size_t clusters, Rng& rng,
                    std::size_t max_iterations, double tolerance) {
  const auto n = static_cast<std::size_t>(x.rows());
  if (clusters == 0) throw ConfigError("kmeans needs at least one cluster");
  if (clusters > n)
    throw ConfigError("kmeans asked for " + std::to_string(clusters) + " clusters but has only " +
                      std::to_string(n) + " training rows");
  if (!x.allFinite()) throw ValidationError("kmeans input contains non-finite values");

  KMeansResult out;
  Eigen::MatrixXd centroids = seed_plus_plus(x, clusters, rng);
  std::vector<bool> reseeded(clusters, false);
  std::vector<std::size_t> labels = assign_all(x, centroids);

  for (std::size_t iter = 0; iter < max_iterations; ++iter) {
    out.iterations = iter + 1;
    const auto c_count = static_cast<std::size_t>(centroids.rows());
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(centroids.rows(), x.cols());
    std::vector<std::size_t> counts(c_count, 0);
    for (std::size_t i = 0; i < n; ++i) {
      sums.row(static_cast<Eigen::Index>(labels[i])) += x.row(static_cast<Eigen::Index>(i));
      ++counts[labels[i]];
    }

    Eigen::MatrixXd next = centroids;
    std::vector<std::size_t> dropped;
    for (std::size_t c = 0; c < c_count; ++c) {
      const auto ci = static_cast<Eigen::Index>(c);
      if (counts[c] > 0) {
        next.row(ci) = sums.row(ci) / static_cast<double>(counts[c]);
        continue;
      }
      if (!reseeded[c]) {
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = (x.row(static_cast<Eigen::Index>(i)) -
                            centroids.row(static_cast<Eigen::Index>(labels[i])))
                               .squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        next.row(ci) = x.row(static_cast<Eigen::Index>(far));
        reseeded[c] = true;
        out.warnings.push_back("cluster " + std::to_string(c) +
                               " emptied; re-seeded at the farthest point");
      } else {
        dropped.push_back(c);
      }
    }

    if (!dropped.empty()) {
      Eigen::MatrixXd kept(static_cast<Eigen::Index>(c_count - dropped.size()), x.cols());
      std::vector<bool> kept_reseeded;
      Eigen::Index r = 0;
      for (std::size_t c = 0; c < c_count; ++c) {
        if (std::find(dropped.begin(), dropped.end(), c) != dropped.end()) continue;
        kept.row(r++) = next.row(static_cast<Eigen::Index>(c));
        kept_reseeded.push_back(reseeded[c]);
      }
      for (auto c : dropped)
        out.warnings.push_back("cluster " + std::to_string(c) +
                               " emptied again after re-seeding; dropped");
      centroids = std::move(kept);
      reseeded = std::move(kept_reseeded);
      labels = assign_all(x, centroids);
      continue;
    }

    double shift = 0.0;
    for (Eigen::Index c = 0; c < centroids.rows(); ++c)
      shift = std::max(shift, (next.row(c) - centroids.row(c)).norm());
    centroids = std::move(next);
    labels = assign_all(x, centroids);
    if (shift < tolerance) break;
  }
  out.inertia = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    out.inertia += (x.row(static_cast<Eigen::Index>(i)) -
                    centroids.row(static_cast<Eigen::Index>(labels[i])))
                       .squaredNorm();
  out.centroids = std::move(centroids);
  out.labels = std::move(labels);
  return out;
}

KMeansRouter::KMeansRouter(RouterConfig config, Eigen::MatrixXd centroids,
                           Eigen::MatrixXd cluster_u, Eigen::MatrixXd cluster_c)
    : TrainedRouter(std::move(config), static_cast<std::size_t>(centroids.cols()),
                    static_cast<std::size_t>(cluster_u.cols())),
      centroids_(std::move(centroids)),
      cluster_u_(std::move(cluster_u)),
      cluster_c_(std::move(cluster_c)) {
  if (cluster_u_.rows() != centroids_.rows() || cluster_c_.rows() != centroids_.rows() ||
      cluster_c_.cols() != cluster_u_.cols())
    throw ValidationError("kmeans router tables do not match the centroid count");
}

std::vector<std::size_t> KMeansRouter::assign(const Eigen::MatrixXd& features) const {
  check_features(features);
  return assign_all(features, centroids_);
}

Prediction KMeansRouter::predict(const Eigen::MatrixXd& features) const {
  const auto labels = assign(features);
  Prediction p{Eigen::MatrixXd(features.rows(), cluster_u_.cols()),
               Eigen::MatrixXd(features.rows(), cluster_u_.cols())};
  for (std::size_t i = 0; i < labels.size(); ++i) {
    p.u_hat.row(static_cast<Eigen::Index>(i)) = cluster_u_.row(static_cast<Eigen::Index>(labels[i]));
    p.c_hat.row(static_cast<Eigen::Index>(i)) = cluster_c_.row(static_cast<Eigen::Index>(labels[i]));
  }
  return p;
}

std::unique_ptr<KMeansRouter> fit_kmeans(const RouterConfig& config, const FitInput& data) {
  RouterConfig cfg = config;
  cfg.kind = RouterKind::kmeans;
  validate(cfg);
  // Independent k-means++ runs; the lowest inertia wins, ties to the earlier run.
  KMeansResult km;
  for (std::size_t run = 0; run < cfg.restarts; ++run) {
    Rng rng(derive_seed(derive_seed(cfg.seed, kKMeansStream), run));
    KMeansResult trial = kmeans(data.x, cfg.clusters, rng);
    if (run == 0 || trial.inertia < km.inertia) km = std::move(trial);
  }

  // Per-cluster statistics come from train members, or from the val rows
  // assigned to each cluster when so configured.
  const bool use_val = cfg.cluster_stats_from_val && data.x_val.rows() > 0;
  const Eigen::MatrixXd& u = use_val ? data.u_val : data.u;
  const Eigen::MatrixXd& c = use_val ? data.c_val : data.c;
  const std::vector<std::size_t> labels = use_val ? assign_all(data.x_val, km.centroids) : km.labels;

  const auto clusters = km.centroids.rows();
  const auto k = u.cols();
  const Eigen::RowVectorXd u_global = nan_column_means(u);
  const Eigen::RowVectorXd c_global = nan_column_means(c);
  Eigen::MatrixXd sum_u = Eigen::MatrixXd::Zero(clusters, k);
  Eigen::MatrixXd sum_c = Eigen::MatrixXd::Zero(clusters, k);
  Eigen::MatrixXd n_u = Eigen::MatrixXd::Zero(clusters, k);
  Eigen::MatrixXd n_c = Eigen::MatrixXd::Zero(clusters, k);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const auto cl = static_cast<Eigen::Index>(labels[i]);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (!std::isnan(u(row, j))) {
        sum_u(cl, j) += u(row, j);
        n_u(cl, j) += 1.0;
      }
      if (!std::isnan(c(row, j))) {
        sum_c(cl, j) += c(row, j);
        n_c(cl, j) += 1.0;
      }
    }
  }
  std::size_t fallbacks = 0;
  Eigen::MatrixXd cluster_u(clusters, k);
  Eigen::MatrixXd cluster_c(clusters, k);
  for (Eigen::Index cl = 0; cl < clusters; ++cl)
    for (Eigen::Index j = 0; j < k; ++j) {
      if (n_u(cl, j) > 0) {
        cluster_u(cl, j) = sum_u(cl, j) / n_u(cl, j);
      } else {
        cluster_u(cl, j) = u_global(j);
        ++fallbacks;
      }
      cluster_c(cl, j) = n_c(cl, j) > 0 ? sum_c(cl, j) / n_c(cl, j) : c_global(j);
    }

  auto router = std::make_unique<KMeansRouter>(cfg, std::move(km.centroids), std::move(cluster_u),
                                               std::move(cluster_c));
  for (auto& w : km.warnings) router->note(std::move(w));
  if (fallbacks)
    router->note(std::to_string(fallbacks) +
                 " (cluster, model) cells had no observations; used column means");
  return router;
}

}  // namespace mmroute
