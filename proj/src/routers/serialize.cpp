#include "mmroute/binary_io.hpp"
#include "mmroute/error.hpp"
#include "mmroute/routers.hpp"

namespace mmroute {

namespace {

constexpr std::string_view kMagic = "MMRR";
constexpr std::uint32_t kVersion = 1;

void put_matrix(BinaryWriter& w, const Eigen::MatrixXd& m) {
  w.put(static_cast<std::uint64_t>(m.rows()));
  w.put(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index k = 0; k < m.size(); ++k) w.put(m.data()[k]);
}

Eigen::MatrixXd get_matrix(BinaryReader& r) {
  const auto rows = r.get<std::uint64_t>();
  const auto cols = r.get<std::uint64_t>();
  if (rows != 0 && cols > r.remaining() / 8 / rows) throw ValidationError("router blob matrix exceeds blob size");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = r.get<double>();
  return m;
}

void put_vector(BinaryWriter& w, const Eigen::VectorXd& v) { put_matrix(w, v); }

Eigen::VectorXd get_vector(BinaryReader& r) {
  Eigen::MatrixXd m = get_matrix(r);
  if (m.cols() != 1) throw ValidationError("router blob: expected a vector");
  return m.col(0);
}

void put_ridge(BinaryWriter& w, const RidgeFit& fit) {
  put_matrix(w, fit.weights);
  put_matrix(w, fit.intercept);
  w.put(static_cast<std::uint32_t>(fit.unobserved_outputs.size()));
  for (auto j : fit.unobserved_outputs) w.put(static_cast<std::uint64_t>(j));
}

RidgeFit get_ridge(BinaryReader& r) {
  RidgeFit fit;
  fit.weights = get_matrix(r);
  const Eigen::MatrixXd b = get_matrix(r);
  if (b.rows() != 1 || b.cols() != fit.weights.cols())
    throw ValidationError("router blob: intercept shape mismatch");
  fit.intercept = b.row(0);
  const auto count = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < count; ++i)
    fit.unobserved_outputs.push_back(static_cast<std::size_t>(r.get<std::uint64_t>()));
  return fit;
}

void put_config(BinaryWriter& w, const RouterConfig& c) {
  w.put(static_cast<std::uint64_t>(c.clusters));
  w.put(static_cast<std::uint64_t>(c.restarts));
  w.put(static_cast<std::uint64_t>(c.neighbors));
  w.put(static_cast<std::uint64_t>(c.rank));
  w.put(c.ridge_penalty);
  w.put(static_cast<std::uint32_t>(c.hidden_dims.size()));
  for (auto h : c.hidden_dims) w.put(static_cast<std::uint64_t>(h));
  w.put(static_cast<std::uint64_t>(c.mf_hidden));
  w.put(c.learning_rate);
  w.put(static_cast<std::uint64_t>(c.epochs));
  w.put(static_cast<std::uint64_t>(c.batch_size));
  w.put(c.seed);
  w.put(static_cast<std::uint8_t>(c.cost_aware));
  w.put(static_cast<std::uint8_t>(c.cluster_stats_from_val));
  w.put(static_cast<std::uint8_t>(c.features.has_value()));
  w.put(static_cast<std::uint8_t>(c.features ? static_cast<int>(*c.features) : 0));
}

RouterConfig get_config(BinaryReader& r, RouterKind kind) {
  RouterConfig c;
  c.kind = kind;
  c.clusters = r.get<std::uint64_t>();
  c.restarts = r.get<std::uint64_t>();
  c.neighbors = r.get<std::uint64_t>();
  c.rank = r.get<std::uint64_t>();
  c.ridge_penalty = r.get<double>();
  const auto hidden = r.get<std::uint32_t>();
  if (hidden > 64) throw ValidationError("router blob: implausible hidden layer count");
  c.hidden_dims.clear();
  for (std::uint32_t i = 0; i < hidden; ++i) c.hidden_dims.push_back(r.get<std::uint64_t>());
  c.mf_hidden = r.get<std::uint64_t>();
  c.learning_rate = r.get<double>();
  c.epochs = r.get<std::uint64_t>();
  c.batch_size = r.get<std::uint64_t>();
  c.seed = r.get<std::uint64_t>();
  c.cost_aware = r.get<std::uint8_t>() != 0;
  c.cluster_stats_from_val = r.get<std::uint8_t>() != 0;
  const bool has_features = r.get<std::uint8_t>() != 0;
  const auto mode = r.get<std::uint8_t>();
  if (mode > static_cast<int>(FusionMode::image_only))
    throw ValidationError("router blob: unknown feature mode");
  if (has_features) c.features = static_cast<FusionMode>(mode);
  return c;
}

void put_mlp(BinaryWriter& w, const Mlp& net) {
  w.put(static_cast<std::uint32_t>(net.layer_sizes().size()));
  for (auto s : net.layer_sizes()) w.put(static_cast<std::uint64_t>(s));
  put_vector(w, net.params());
}

Mlp get_mlp(BinaryReader& r) {
  const auto count = r.get<std::uint32_t>();
  if (count < 2 || count > 64) throw ValidationError("router blob: bad layer count");
  std::vector<std::size_t> sizes;
  for (std::uint32_t i = 0; i < count; ++i) sizes.push_back(r.get<std::uint64_t>());
  Mlp net(sizes);
  Eigen::VectorXd p = get_vector(r);
  if (p.size() != net.params().size()) throw ValidationError("router blob: parameter count mismatch");
  net.params() = std::move(p);
  return net;
}

void put_latent(BinaryWriter& w, const LatentFactorNet& net) {
  w.put(static_cast<std::uint64_t>(net.input_dim()));
  w.put(static_cast<std::uint64_t>(net.hidden_dim()));
  w.put(static_cast<std::uint64_t>(net.rank()));
  w.put(static_cast<std::uint64_t>(net.outputs()));
  put_vector(w, net.params());
}

LatentFactorNet get_latent(BinaryReader& r) {
  const auto d = r.get<std::uint64_t>();
  const auto h = r.get<std::uint64_t>();
  const auto rank = r.get<std::uint64_t>();
  const auto k = r.get<std::uint64_t>();
  LatentFactorNet net(d, h, rank, k);
  Eigen::VectorXd p = get_vector(r);
  if (p.size() != net.params().size()) throw ValidationError("router blob: parameter count mismatch");
  net.params() = std::move(p);
  return net;
}

}  // namespace

std::string save_router(const TrainedRouter& router) {
  if (router.analysis_only())
    throw ConfigError("analysis-only routers read evaluation outcomes and cannot be saved");
  BinaryWriter w;
  w.put_bytes(kMagic);
  w.put(kVersion);
  w.put(static_cast<std::uint32_t>(router.kind()));
  put_config(w, router.config());
  w.put(static_cast<std::uint64_t>(router.feature_dim()));
  w.put(static_cast<std::uint64_t>(router.num_models()));

  switch (router.kind()) {
    case RouterKind::random:
      break;
    case RouterKind::kmeans: {
      const auto& r = dynamic_cast<const KMeansRouter&>(router);
      put_matrix(w, r.centroids());
      put_matrix(w, r.cluster_utilities());
      put_matrix(w, r.cluster_costs());
      break;
    }
    case RouterKind::knn: {
      const auto& r = dynamic_cast<const KnnRouter&>(router);
      put_matrix(w, r.training_features());
      put_matrix(w, r.training_utilities());
      put_matrix(w, r.training_costs());
      break;
    }
    case RouterKind::linear: {
      const auto& r = dynamic_cast<const LinearRouter&>(router);
      put_ridge(w, r.utility_fit());
      put_ridge(w, r.cost_fit());
      break;
    }
    case RouterKind::linear_mf: {
      const auto& r = dynamic_cast<const LinearMfRouter&>(router);
      put_matrix(w, r.projection().components);
      put_vector(w, r.projection().singular_values);
      w.put(static_cast<std::uint64_t>(r.projection().requested_rank));
      put_ridge(w, r.utility_fit());
      put_ridge(w, r.cost_fit());
      break;
    }
    case RouterKind::mlp: {
      const auto& r = dynamic_cast<const MlpRouter&>(router);
      put_mlp(w, r.utility_net());
      put_mlp(w, r.cost_net());
      break;
    }
    case RouterKind::mlp_mf: {
      const auto& r = dynamic_cast<const MlpMfRouter&>(router);
      put_latent(w, r.utility_net());
      put_latent(w, r.cost_net());
      break;
    }
    case RouterKind::oracle:
      break;
  }
  w.put(static_cast<std::uint32_t>(router.diagnostics().size()));
  for (const auto& m : router.diagnostics()) w.put_string(m);
  return w.bytes();
}

std::unique_ptr<TrainedRouter> load_router(const std::string& bytes,
                                           std::optional<std::size_t> expected_dim) {
  BinaryReader r(bytes);
  if (r.remaining() < kMagic.size() || r.get_bytes(kMagic.size()) != kMagic)
    throw ValidationError("not a router file (bad magic)");
  const auto version = r.get<std::uint32_t>();
  if (version != kVersion)
    throw ValidationError("unsupported router file version " + std::to_string(version));
  const auto tag = r.get<std::uint32_t>();
  if (tag > static_cast<std::uint32_t>(RouterKind::mlp_mf) ||
      tag == static_cast<std::uint32_t>(RouterKind::oracle))
    throw ValidationError("router file has an invalid kind tag " + std::to_string(tag));
  const auto kind = static_cast<RouterKind>(tag);
  const RouterConfig cfg = get_config(r, kind);
  const auto d = static_cast<std::size_t>(r.get<std::uint64_t>());
  const auto k = static_cast<std::size_t>(r.get<std::uint64_t>());
  if (expected_dim && *expected_dim != d)
    throw ValidationError("router was trained on " + std::to_string(d) +
                          "-dimensional features but the embeddings have dimension " +
                          std::to_string(*expected_dim));

  std::unique_ptr<TrainedRouter> out;
  switch (kind) {
    case RouterKind::random:
      out = std::make_unique<RandomRouter>(cfg, d, k);
      break;
    case RouterKind::kmeans: {
      Eigen::MatrixXd centroids = get_matrix(r);
      Eigen::MatrixXd cu = get_matrix(r);
      Eigen::MatrixXd cc = get_matrix(r);
      out = std::make_unique<KMeansRouter>(cfg, std::move(centroids), std::move(cu), std::move(cc));
      break;
    }
    case RouterKind::knn: {
      Eigen::MatrixXd x = get_matrix(r);
      Eigen::MatrixXd u = get_matrix(r);
      Eigen::MatrixXd c = get_matrix(r);
      out = std::make_unique<KnnRouter>(cfg, std::move(x), std::move(u), std::move(c));
      break;
    }
    case RouterKind::linear: {
      RidgeFit u = get_ridge(r);
      RidgeFit c = get_ridge(r);
      out = std::make_unique<LinearRouter>(cfg, d, std::move(u), std::move(c));
      break;
    }
    case RouterKind::linear_mf: {
      TruncatedSvd svd;
      svd.components = get_matrix(r);
      svd.singular_values = get_vector(r);
      svd.requested_rank = r.get<std::uint64_t>();
      RidgeFit u = get_ridge(r);
      RidgeFit c = get_ridge(r);
      out = std::make_unique<LinearMfRouter>(cfg, std::move(svd), std::move(u), std::move(c));
      break;
    }
    case RouterKind::mlp: {
      Mlp u = get_mlp(r);
      Mlp c = get_mlp(r);
      out = std::make_unique<MlpRouter>(cfg, std::move(u), std::move(c));
      break;
    }
    case RouterKind::mlp_mf: {
      LatentFactorNet u = get_latent(r);
      LatentFactorNet c = get_latent(r);
      out = std::make_unique<MlpMfRouter>(cfg, std::move(u), std::move(c));
      break;
    }
    case RouterKind::oracle:
      break;
  }
  const auto notes = r.get<std::uint32_t>();
  for (std::uint32_t i = 0; i < notes; ++i) out->note(r.get_string());
  if (!r.at_end()) throw ValidationError("router file has trailing bytes");
  if (out->feature_dim() != d || out->num_models() != k)
    throw ValidationError("router file header disagrees with its parameters");
  return out;
}

}  // namespace mmroute
