#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pstar/config.hpp"
#include "pstar/dataset.hpp"
#include "pstar/dfv.hpp"
#include "pstar/executor.hpp"
#include "pstar/library.hpp"
#include "pstar/sampler.hpp"
#include "pstar/search.hpp"

namespace pstar {

// ---- extract-features -------------------------------------------------------

struct FeatureRow {
  std::string id;
  std::optional<DifficultyFeatureVector> dfv;  // normalized filled when stats exist
  std::optional<std::string> error;            // set when this record failed
};

struct FeatureExtraction {
  std::vector<FeatureRow> rows;
  std::optional<NormalizationStats> stats;  // fitted over the successful rows
  std::size_t failures = 0;
};

// Per-record failures are recorded in the row and do not stop the run.
FeatureExtraction extract_features(const Dataset& dataset, const CannyParams& canny, std::size_t workers = 1);

// JSON lines, one row per record: {"id", "raw": [5], "normalized": [5]} or
// {"id", "error": "..."}.
void write_feature_file(const FeatureExtraction& features, const std::filesystem::path& path);
std::vector<FeatureRow> read_feature_file(const std::filesystem::path& path);

void write_stats_file(const NormalizationStats& stats, const std::filesystem::path& path);
NormalizationStats read_stats_file(const std::filesystem::path& path);

// ---- sample-seeds -----------------------------------------------------------

struct SeedSampling {
  std::vector<std::string> row_ids;  // ids of the usable rows, in file order
  std::vector<std::string> seed_ids;  // greedy order
  SeedSelection selection;            // indices into row_ids
  std::optional<PcaProjection> pca;   // absent with fewer than 2 rows
};

SeedSampling sample_seeds(const std::vector<FeatureRow>& rows, std::size_t k);
// "index,x,y,selected" with one line per usable row.
std::string pca_csv(const SeedSampling& sampling);

std::vector<std::string> read_id_list(const std::filesystem::path& path);
void write_id_list(const std::vector<std::string>& ids, const std::filesystem::path& path);

// ---- build-library ----------------------------------------------------------

struct UnsolvedSeed {
  std::string id;
  std::size_t attempts = 0;
};

struct BuildReport {
  std::size_t solved = 0;
  std::size_t skipped = 0;  // already solved on a previous run
  std::vector<UnsolvedSeed> unsolved;
};

struct BuildContext {
  const VisionLanguageModel* backend = nullptr;
  const TextEmbedder* embedder = nullptr;
  PipelineConfig config;
  TraceSink* trace = nullptr;
  std::string created_at;
};

// Searches every seed not already solved and appends solved entries to the
// library file (created with a header carrying `stats` when absent). Progress
// is kept in "<library>.progress.jsonl"; unsolved seeds are listed in
// "<library>.unsolved.json".
BuildReport build_library(const Dataset& dataset, const std::vector<std::string>& seed_ids,
                          const NormalizationStats& stats, const BuildContext& ctx,
                          const std::filesystem::path& library_path);

std::filesystem::path progress_path_for(const std::filesystem::path& library_path);
std::filesystem::path unsolved_path_for(const std::filesystem::path& library_path);

// ---- infer ------------------------------------------------------------------

struct InferContext {
  const VisionLanguageModel* backend = nullptr;
  const TextEmbedder* embedder = nullptr;
  PipelineConfig config;
};

// DFV, normalize with the library's stats, embed, retrieve the top entry and
// execute its path.
std::vector<ExecutionTranscript> infer(const std::vector<DatasetRecord>& questions,
                                       const std::filesystem::path& image_root, const PseudocodeLibrary& library,
                                       const InferContext& ctx);

// ---- eval -------------------------------------------------------------------

// Judges each transcript against the dataset record with the same id.
std::vector<JudgedResult> judge_transcripts(const std::vector<ExecutionTranscript>& transcripts,
                                            const std::vector<DatasetRecord>& dataset);

void write_transcripts(const std::vector<ExecutionTranscript>& transcripts, const std::filesystem::path& path);
std::vector<ExecutionTranscript> read_transcripts(const std::filesystem::path& path);

}  // namespace pstar
