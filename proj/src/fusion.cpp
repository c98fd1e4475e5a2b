#include "mmroute/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mmroute/binary_io.hpp"
#include "mmroute/error.hpp"
#include "mmroute/text_io.hpp"

namespace mmroute {

namespace {

constexpr std::uint32_t kEmbeddingVersion = 1;
constexpr double kUnitTolerance = 1e-6;

double sigmoid(double t) { return 1.0 / (1.0 + std::exp(-t)); }

// Normalizes every nonzero row in place; returns the indices of zero rows.
std::vector<std::size_t> normalize_rows(Eigen::MatrixXd& m) {
  std::vector<std::size_t> zero;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm > 0.0) m.row(i) /= norm;
    else zero.push_back(static_cast<std::size_t>(i));
  }
  return zero;
}

bool rows_unit_or_zero(const Eigen::MatrixXd& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double norm = m.row(i).norm();
    if (norm != 0.0 && std::abs(norm - 1.0) > kUnitTolerance) return false;
  }
  return true;
}

double cosine(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Eigen::VectorXd& proto) {
  const double nx = x.norm();
  const double np = proto.norm();
  if (nx == 0.0 || np == 0.0) return 0.0;
  return x.dot(proto.transpose()) / (nx * np);
}

void norm_moments(const Eigen::MatrixXd& m, double& mean, double& sd) {
  const Eigen::VectorXd norms = m.rowwise().norm();
  mean = norms.mean();
  sd = std::sqrt((norms.array() - mean).square().mean());
}

// Confidence of one modality for every row of `m`.
Eigen::VectorXd confidence_column(const Eigen::MatrixXd& m, const Eigen::VectorXd& proto,
                                  double norm_mean, double norm_sd) {
  Eigen::VectorXd conf(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double r = m.row(i).norm();
    // A missing modality gets the lowest possible prototype score.
    const double proto_score = r == 0.0 ? 0.0 : (cosine(m.row(i), proto) + 1.0) / 2.0;
    const double norm_score =
        norm_sd < kDegenerateNormSd ? 0.5 : sigmoid((r - norm_mean) / norm_sd);
    conf(i) = std::clamp(0.5 * proto_score + 0.5 * norm_score, 0.0, 1.0);
  }
  return conf;
}

}  // namespace

void validate(const EmbeddingSet& set) {
  if (set.text.rows() != set.image.rows() || set.text.cols() != set.image.cols()) {
    std::ostringstream msg;
    msg << "text (" << set.text.rows() << "x" << set.text.cols() << ") and image ("
        << set.image.rows() << "x" << set.image.cols() << ") embeddings differ in shape";
    throw ValidationError(msg.str());
  }
  if (set.text.cols() == 0) throw ValidationError("embedding dimension must be positive");
  if (!set.text.allFinite() || !set.image.allFinite())
    throw ValidationError("embeddings contain non-finite values");
  if (set.normalized && (!rows_unit_or_zero(set.text) || !rows_unit_or_zero(set.image)))
    throw ValidationError("embedding set flagged normalized has non-unit rows");
}

EmbeddingSet make_embedding_set(Eigen::MatrixXd text, Eigen::MatrixXd image) {
  EmbeddingSet set{std::move(text), std::move(image), false};
  validate(set);
  set.normalized = rows_unit_or_zero(set.text) && rows_unit_or_zero(set.image);
  return set;
}

EmbeddingSet select_rows(const EmbeddingSet& set, std::span<const std::size_t> rows) {
  EmbeddingSet out;
  out.text.resize(static_cast<Eigen::Index>(rows.size()), set.text.cols());
  out.image.resize(static_cast<Eigen::Index>(rows.size()), set.image.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(rows[r]);
    if (src >= set.text.rows()) throw ValidationError("embedding row index out of range");
    out.text.row(static_cast<Eigen::Index>(r)) = set.text.row(src);
    out.image.row(static_cast<Eigen::Index>(r)) = set.image.row(src);
  }
  out.normalized = set.normalized;
  return out;
}

EmbeddingSet mask_modality(const EmbeddingSet& set, Modality which) {
  EmbeddingSet out = set;
  if (which == Modality::text) out.text.setZero();
  else out.image.setZero();
  return out;
}

// ---- file formats --------------------------------------------------------------

EmbeddingSet load_embeddings(const std::filesystem::path& path,
                             std::optional<std::size_t> expected_rows) {
  const std::string bytes = read_file(path);
  EmbeddingSet set;
  if (bytes.size() >= 4 && bytes.compare(0, 4, "MMRE") == 0) {
    BinaryReader in(bytes);
    in.get_bytes(4);
    const auto version = in.get<std::uint32_t>();
    if (version != kEmbeddingVersion)
      throw ValidationError(path.string() + ": unsupported embedding version " +
                            std::to_string(version));
    const auto n = in.get<std::uint32_t>();
    const auto d = in.get<std::uint32_t>();
    const std::size_t expected = 2ull * n * d * sizeof(float);
    if (in.remaining() != expected)
      throw ValidationError(path.string() + ": expected " + std::to_string(expected) +
                            " payload bytes, found " + std::to_string(in.remaining()));
    set.text.resize(n, d);
    set.image.resize(n, d);
    for (auto* m : {&set.text, &set.image})
      for (std::uint32_t i = 0; i < n; ++i)
        for (std::uint32_t k = 0; k < d; ++k) (*m)(i, k) = static_cast<double>(in.get<float>());
  } else {
    std::istringstream in(bytes);
    std::string line;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const auto text = trim(line);
      if (text.empty() || text.front() == '#') continue;
      std::vector<double> row;
      for (auto field : split_fields(text)) {
        const auto v = parse_double(field);
        if (!v)
          throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                                ": unparseable value '" + std::string(trim(field)) + "'");
        row.push_back(*v);
      }
      if (!rows.empty() && row.size() != rows.front().size())
        throw ValidationError(path.string() + " line " + std::to_string(line_no) +
                              ": row width differs from the first row");
      rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.size() % 2 != 0)
      throw ValidationError(path.string() + ": text embeddings need an even, nonzero row count");
    const auto n = static_cast<Eigen::Index>(rows.size() / 2);
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    set.text.resize(n, d);
    set.image.resize(n, d);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        set.text(i, k) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)];
        set.image(i, k) = rows[static_cast<std::size_t>(n + i)][static_cast<std::size_t>(k)];
      }
  }
  if (expected_rows && set.size() != *expected_rows)
    throw ValidationError(path.string() + ": embedding file has " + std::to_string(set.size()) +
                          " rows but the outcome table has " + std::to_string(*expected_rows) +
                          " instances");
  auto out = make_embedding_set(std::move(set.text), std::move(set.image));
  return out;
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path) {
  validate(set);
  BinaryWriter out;
  out.put_bytes("MMRE");
  out.put(kEmbeddingVersion);
  out.put(static_cast<std::uint32_t>(set.size()));
  out.put(static_cast<std::uint32_t>(set.dim()));
  for (const auto* m : {&set.text, &set.image})
    for (Eigen::Index i = 0; i < m->rows(); ++i)
      for (Eigen::Index k = 0; k < m->cols(); ++k) out.put(static_cast<float>((*m)(i, k)));
  write_file(path, out.bytes());
}

void write_embeddings_text(const EmbeddingSet& set, const std::filesystem::path& path) {
  validate(set);
  std::ostringstream out;
  for (const auto* m : {&set.text, &set.image})
    for (Eigen::Index i = 0; i < m->rows(); ++i) {
      for (Eigen::Index k = 0; k < m->cols(); ++k)
        out << (k ? "," : "") << format_double((*m)(i, k));
      out << '\n';
    }
  write_file(path, out.str());
}

// ---- fusion ----------------------------------------------------------------------

std::string to_string(FusionMode mode) {
  switch (mode) {
    case FusionMode::equal: return "equal";
    case FusionMode::adaptive: return "adaptive";
    case FusionMode::text_only: return "text";
    case FusionMode::image_only: return "image";
  }
  return "adaptive";
}

FusionMode parse_fusion_mode(const std::string& name) {
  if (name == "equal") return FusionMode::equal;
  if (name == "adaptive") return FusionMode::adaptive;
  if (name == "text") return FusionMode::text_only;
  if (name == "image") return FusionMode::image_only;
  throw ConfigError("unknown fusion mode '" + name + "' (equal|adaptive|text|image)");
}

ModalityStats compute_modality_stats(const EmbeddingSet& set) {
  validate(set);
  if (set.size() < 2) throw ValidationError("modality statistics need at least two rows");
  ModalityStats s;
  s.text_prototype = set.text.colwise().mean().transpose();
  s.image_prototype = set.image.colwise().mean().transpose();
  norm_moments(set.text, s.text_norm_mean, s.text_norm_sd);
  norm_moments(set.image, s.image_norm_mean, s.image_norm_sd);
  return s;
}

Eigen::MatrixXd modality_confidence(const EmbeddingSet& set, const ModalityStats& stats) {
  validate(set);
  if (stats.text_prototype.size() != set.text.cols() ||
      stats.image_prototype.size() != set.image.cols())
    throw ValidationError("modality statistics were computed for a different dimension");
  Eigen::MatrixXd conf(set.text.rows(), 2);
  conf.col(0) = confidence_column(set.text, stats.text_prototype, stats.text_norm_mean,
                                  stats.text_norm_sd);
  conf.col(1) = confidence_column(set.image, stats.image_prototype, stats.image_norm_mean,
                                  stats.image_norm_sd);
  return conf;
}

Eigen::MatrixXd modality_confidence(const EmbeddingSet& set) {
  return modality_confidence(set, compute_modality_stats(set));
}

std::pair<double, double> softmax_weights(double conf_text, double conf_image, double temperature) {
  if (!(temperature > 0.0)) throw ConfigError("fusion temperature must be positive");
  const double a = temperature * conf_text;
  const double b = temperature * conf_image;
  const double m = std::max(a, b);
  const double ea = std::exp(a - m);
  const double eb = std::exp(b - m);
  return {ea / (ea + eb), eb / (ea + eb)};
}

FusedFeatures equal_fuse(const EmbeddingSet& set) {
  validate(set);
  FusedFeatures out;
  out.provenance.mode = FusionMode::equal;
  out.z = 0.5 * (set.text + set.image);
  out.zero_rows = normalize_rows(out.z);
  return out;
}

FusedFeatures adaptive_fuse(const EmbeddingSet& set, const Eigen::MatrixXd& confidence,
                            const FusionConfig& config) {
  validate(set);
  if (confidence.rows() != set.text.rows() || confidence.cols() != 2)
    throw ValidationError("confidence matrix must be n x 2");
  if (!(config.temperature > 0.0)) throw ConfigError("fusion temperature must be positive");
  FusedFeatures out;
  out.provenance = config;
  out.provenance.mode = FusionMode::adaptive;
  out.z.resize(set.text.rows(), set.text.cols());
  for (Eigen::Index i = 0; i < set.text.rows(); ++i) {
    const auto [wt, wi] = softmax_weights(confidence(i, 0), confidence(i, 1), config.temperature);
    const auto xt = set.text.row(i).array();
    const auto xi = set.image.row(i).array();
    out.z.row(i) = (wt * xt + wi * xi + config.alpha * (xt * xi) + config.beta * (xt - xi).abs())
                       .matrix();
  }
  out.zero_rows = normalize_rows(out.z);
  return out;
}

FusedFeatures unimodal_features(const EmbeddingSet& set, Modality which) {
  validate(set);
  FusedFeatures out;
  out.provenance.mode = which == Modality::text ? FusionMode::text_only : FusionMode::image_only;
  out.z = which == Modality::text ? set.text : set.image;
  out.zero_rows = normalize_rows(out.z);
  return out;
}

FusedFeatures fuse(const EmbeddingSet& set, const FusionConfig& config, const ModalityStats& stats) {
  switch (config.mode) {
    case FusionMode::equal: {
      auto out = equal_fuse(set);
      out.provenance = config;
      return out;
    }
    case FusionMode::adaptive:
      return adaptive_fuse(set, modality_confidence(set, stats), config);
    case FusionMode::text_only: return unimodal_features(set, Modality::text);
    case FusionMode::image_only: return unimodal_features(set, Modality::image);
  }
  throw ConfigError("unknown fusion mode");
}

}  // namespace mmroute
