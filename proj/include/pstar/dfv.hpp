#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>

#include <json.hpp>

#include "pstar/canny.hpp"
#include "pstar/image.hpp"

namespace pstar {

struct DatasetRecord;

inline constexpr std::size_t kFeatureDims = 5;
using FeatureVector = std::array<double, kFeatureDims>;

struct TextMetrics {
  double asl = 0.0;  // words per sentence
  double asw = 0.0;  // syllables per word
  std::size_t word_count = 0;
  std::size_t sentence_count = 0;
};

// Five difficulty features of one question. Order of raw():
// fre, entropy, clc, edge_density, color_diversity.
struct DifficultyFeatureVector {
  double fre = 0.0;
  double entropy = 0.0;
  double clc = 0.0;
  double edge_density = 0.0;     // 0 when the question has no image
  double color_diversity = 0.0;  // 0 when the question has no image
  std::optional<FeatureVector> normalized;

  FeatureVector raw() const { return {fre, entropy, clc, edge_density, color_diversity}; }
  static DifficultyFeatureVector from_raw(const FeatureVector& v);
};

struct NormalizationStats {
  FeatureVector means{};
  FeatureVector stds{};
  std::array<bool, kFeatureDims> degenerate{};
};

TextMetrics text_metrics(std::string_view text);
double flesch_reading_ease(const TextMetrics& m);
double shannon_entropy(std::string_view text);
double edge_pixel_density(const RgbImage& image, const CannyParams& params = {});
double color_diversity(const RgbImage& image);

DifficultyFeatureVector compute_dfv(std::string_view text, const RgbImage* image,
                                    const CannyParams& params = {});
// Resolves record.image relative to `image_root`.
DifficultyFeatureVector compute_dfv(const DatasetRecord& record,
                                    const std::filesystem::path& image_root,
                                    const CannyParams& params = {});

// Per-dimension mean and population std. A dimension whose values are all
// equal is flagged degenerate and maps to z = 0. Throws TooFewSamples below 2.
NormalizationStats fit_normalization(std::span<const FeatureVector> vectors);
NormalizationStats fit_normalization(std::span<const DifficultyFeatureVector> dfvs);

FeatureVector apply_normalization(const FeatureVector& x, const NormalizationStats& stats);
FeatureVector apply_normalization(const DifficultyFeatureVector& dfv,
                                  const std::optional<NormalizationStats>& stats);

nlohmann::json to_json(const NormalizationStats& stats);
NormalizationStats stats_from_json(const nlohmann::json& j);

}  // namespace pstar
