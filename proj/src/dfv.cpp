#include "pstar/dfv.hpp"

#include <cmath>
#include <map>
#include <unordered_set>

#include <json.hpp>

#include "pstar/dataset.hpp"
#include "pstar/error.hpp"
#include "pstar/text.hpp"

namespace pstar {

DifficultyFeatureVector DifficultyFeatureVector::from_raw(const FeatureVector& v) {
  DifficultyFeatureVector d;
  d.fre = v[0];
  d.entropy = v[1];
  d.clc = v[2];
  d.edge_density = v[3];
  d.color_diversity = v[4];
  return d;
}

TextMetrics text_metrics(std::string_view text) {
  const auto ws = text::words(text);
  if (ws.empty()) throw Error(ErrorKind::EmptyText, "no words in text");
  std::size_t syll = 0;
  for (const auto& w : ws) syll += static_cast<std::size_t>(text::syllables(w));
  TextMetrics m;
  m.word_count = ws.size();
  m.sentence_count = std::max<std::size_t>(1, text::sentence_count(text));
  m.asl = static_cast<double>(m.word_count) / static_cast<double>(m.sentence_count);
  m.asw = static_cast<double>(syll) / static_cast<double>(m.word_count);
  return m;
}

double flesch_reading_ease(const TextMetrics& m) {
  return 206.835 - 1.015 * m.asl - 84.6 * m.asw;
}

double shannon_entropy(std::string_view text) {
  const auto ws = text::words(text);
  if (ws.empty()) throw Error(ErrorKind::EmptyText, "no words in text");
  std::map<std::string, std::size_t> counts;
  for (const auto& w : ws) ++counts[w];
  const auto total = static_cast<double>(ws.size());
  double h = 0.0;
  for (const auto& [word, c] : counts) {
    const double p = static_cast<double>(c) / total;
    h -= p * std::log2(p);
  }
  return h == 0.0 ? 0.0 : h;  // avoid -0
}

double edge_pixel_density(const RgbImage& image, const CannyParams& params) {
  const auto edges = canny(image, params);
  return static_cast<double>(edges.edge_count()) / static_cast<double>(image.pixel_count());
}

double color_diversity(const RgbImage& image) {
  if (image.empty()) throw Error(ErrorKind::EmptyImage, "image has no pixels");
  std::unordered_set<std::uint32_t> colors;
  colors.reserve(image.pixel_count());
  const auto b = image.bytes();
  for (std::size_t i = 0; i < image.pixel_count(); ++i) {
    colors.insert((std::uint32_t{b[3 * i]} << 16) | (std::uint32_t{b[3 * i + 1]} << 8) | b[3 * i + 2]);
  }
  return static_cast<double>(colors.size()) / static_cast<double>(image.pixel_count());
}

DifficultyFeatureVector compute_dfv(std::string_view text, const RgbImage* image,
                                    const CannyParams& params) {
  const auto m = text_metrics(text);
  DifficultyFeatureVector d;
  d.fre = flesch_reading_ease(m);
  d.entropy = shannon_entropy(text);
  d.clc = m.asl;
  if (image != nullptr) {
    d.edge_density = edge_pixel_density(*image, params);
    d.color_diversity = color_diversity(*image);
  }
  return d;
}

DifficultyFeatureVector compute_dfv(const DatasetRecord& record,
                                    const std::filesystem::path& image_root,
                                    const CannyParams& params) {
  if (!record.image) return compute_dfv(record.question, nullptr, params);
  const auto img = load_image(resolve_image(*record.image, image_root));
  return compute_dfv(record.question, &img, params);
}

NormalizationStats fit_normalization(std::span<const FeatureVector> vectors) {
  if (vectors.size() < 2) throw Error(ErrorKind::TooFewSamples, "normalization needs at least 2 vectors");
  NormalizationStats s;
  const auto n = static_cast<double>(vectors.size());
  for (std::size_t d = 0; d < kFeatureDims; ++d) {
    double sum = 0.0;
    for (const auto& v : vectors) sum += v[d];
    const double mean = sum / n;
    double ss = 0.0;
    bool all_equal = true;
    for (const auto& v : vectors) {
      const double diff = v[d] - mean;
      ss += diff * diff;
      all_equal = all_equal && v[d] == vectors.front()[d];
    }
    s.means[d] = mean;
    s.stds[d] = all_equal ? 0.0 : std::sqrt(ss / n);
    s.degenerate[d] = s.stds[d] == 0.0;
  }
  return s;
}

NormalizationStats fit_normalization(std::span<const DifficultyFeatureVector> dfvs) {
  std::vector<FeatureVector> raw;
  raw.reserve(dfvs.size());
  for (const auto& d : dfvs) raw.push_back(d.raw());
  return fit_normalization(std::span<const FeatureVector>(raw));
}

FeatureVector apply_normalization(const FeatureVector& x, const NormalizationStats& stats) {
  FeatureVector z{};
  for (std::size_t d = 0; d < kFeatureDims; ++d) {
    z[d] = stats.degenerate[d] ? 0.0 : (x[d] - stats.means[d]) / stats.stds[d];
  }
  return z;
}

FeatureVector apply_normalization(const DifficultyFeatureVector& dfv,
                                  const std::optional<NormalizationStats>& stats) {
  if (!stats) throw Error(ErrorKind::MissingStats, "normalization stats are required");
  return apply_normalization(dfv.raw(), *stats);
}

nlohmann::json to_json(const NormalizationStats& stats) {
  return {{"means", stats.means}, {"stds", stats.stds}, {"degenerate", stats.degenerate}};
}

NormalizationStats stats_from_json(const nlohmann::json& j) {
  try {
    NormalizationStats s;
    s.means = j.at("means").get<FeatureVector>();
    s.stds = j.at("stds").get<FeatureVector>();
    s.degenerate = j.at("degenerate").get<std::array<bool, kFeatureDims>>();
    for (std::size_t d = 0; d < kFeatureDims; ++d) {
      if (!s.degenerate[d] && !(s.stds[d] > 0.0)) {
        throw Error(ErrorKind::MalformedData, "non-degenerate dimension with std <= 0");
      }
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MissingStats, std::string("malformed normalization stats: ") + e.what());
  }
}

}  // namespace pstar
