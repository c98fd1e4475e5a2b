#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mmroute {

enum class Modality { text, image };

/// Per-instance text and image vectors sharing one dimension. A zero row
/// encodes a missing modality.
struct EmbeddingSet {
  Eigen::MatrixXd text;   // n x d
  Eigen::MatrixXd image;  // n x d
  bool normalized = false;

  std::size_t size() const { return static_cast<std::size_t>(text.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(text.cols()); }
};

// Checks shapes and, when `normalized` is set, that every nonzero row has
// unit norm within 1e-6. Throws ValidationError.
void validate(const EmbeddingSet& set);

// Builds a set and derives the `normalized` flag from the data.
EmbeddingSet make_embedding_set(Eigen::MatrixXd text, Eigen::MatrixXd image);

EmbeddingSet select_rows(const EmbeddingSet& set, std::span<const std::size_t> rows);

// Zeroes the chosen modality in a copy; the input is untouched.
EmbeddingSet mask_modality(const EmbeddingSet& set, Modality which);

// Binary layout: "MMRE", u32 version, u32 n, u32 d, then n*d little-endian
// f32 text values and n*d image values, row-major. A comma-separated text
// file with 2n rows (text rows first) is accepted for small fixtures.
EmbeddingSet load_embeddings(const std::filesystem::path& path,
                             std::optional<std::size_t> expected_rows = std::nullopt);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);
void write_embeddings_text(const EmbeddingSet& set, const std::filesystem::path& path);

// ---- fusion ------------------------------------------------------------------

// `text_only` / `image_only` route on a single normalized modality; they are
// the unimodal references for modality-gap experiments.
enum class FusionMode { equal, adaptive, text_only, image_only };

std::string to_string(FusionMode mode);
FusionMode parse_fusion_mode(const std::string& name);

struct FusionConfig {
  FusionMode mode = FusionMode::adaptive;
  double temperature = 5.0;
  double alpha = 0.5;  // weight of the elementwise product term
  double beta = 0.5;   // weight of the absolute difference term
};

struct FusedFeatures {
  Eigen::MatrixXd z;  // n x d, nonzero rows have unit norm
  FusionConfig provenance;
  std::vector<std::size_t> zero_rows;  // rows with nothing to fuse
};

/// Set-level statistics the confidence estimate is relative to: modality
/// prototypes (mean vectors) and the mean / population standard deviation of
/// row norms. Computed once on the training rows and reused for val/test.
struct ModalityStats {
  Eigen::VectorXd text_prototype;
  Eigen::VectorXd image_prototype;
  double text_norm_mean = 0.0;
  double text_norm_sd = 0.0;
  double image_norm_mean = 0.0;
  double image_norm_sd = 0.0;
};

// Requires at least two rows.
ModalityStats compute_modality_stats(const EmbeddingSet& set);

// Norm standard deviations below this are treated as zero; the norm score is
// then 0.5 for every row.
inline constexpr double kDegenerateNormSd = 1e-6;

// n x 2 matrix of (text, image) confidences in [0,1]: the equal blend of the
// prototype score (cos + 1)/2 and the sigmoid of the standardized norm,
// clipped. Zero rows get prototype score 0 and norm r = 0.
Eigen::MatrixXd modality_confidence(const EmbeddingSet& set, const ModalityStats& stats);
Eigen::MatrixXd modality_confidence(const EmbeddingSet& set);

// softmax(temperature * [conf_text, conf_image]).
std::pair<double, double> softmax_weights(double conf_text, double conf_image, double temperature);

FusedFeatures equal_fuse(const EmbeddingSet& set);
FusedFeatures adaptive_fuse(const EmbeddingSet& set, const Eigen::MatrixXd& confidence,
                            const FusionConfig& config);
// Normalized single-modality features.
FusedFeatures unimodal_features(const EmbeddingSet& set, Modality which);

// Dispatches on config.mode; adaptive fusion uses the supplied (frozen) stats.
FusedFeatures fuse(const EmbeddingSet& set, const FusionConfig& config, const ModalityStats& stats);

}  // namespace mmroute
