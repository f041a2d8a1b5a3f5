#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstar/backend.hpp"
#include "pstar/dfv.hpp"
#include "pstar/search.hpp"

namespace pstar {

inline constexpr int kLibrarySchemaVersion = 1;

struct LibraryEntry {
  std::string question_id;
  std::string question;
  DifficultyFeatureVector dfv;  // normalized must be set
  EmbeddingVector embedding;
  ReasoningPath path;
  double g_cost = 0.0;
  std::string created_at;
  std::string backend;
};

struct LibraryHeader {
  int schema = kLibrarySchemaVersion;
  std::size_t dim = 0;  // embedding dimension shared by entries and queries
  NormalizationStats stats;
};

class PseudocodeLibrary {
 public:
  PseudocodeLibrary() = default;
  explicit PseudocodeLibrary(LibraryHeader header) : header_(std::move(header)) {}

  // Throws DimensionMismatch / InvalidRecord when the entry breaks the
  // library invariants.
  void add(LibraryEntry entry);

  const LibraryHeader& header() const noexcept { return header_; }
  const std::vector<LibraryEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const LibraryEntry* find(const std::string& question_id) const;

 private:
  LibraryHeader header_;
  std::vector<LibraryEntry> entries_;
};

void validate_entry(const LibraryEntry& entry, const LibraryHeader& header);

struct RetrievalConfig {
  double alpha = 0.5;
  std::size_t top_k = 1;

  void validate() const;
};

// Hybrid similarity: alpha * ||a - b||_2 - (1 - alpha) * cos(ea, eb) over
// z-scored difficulty vectors. Lower is better.
double hss(const FeatureVector& a, const EmbeddingVector& ea, const FeatureVector& b, const EmbeddingVector& eb,
           double alpha);
double hss(const FeatureVector& query_normalized, const EmbeddingVector& query_embedding, const LibraryEntry& entry,
           double alpha);

struct Retrieved {
  const LibraryEntry* entry = nullptr;
  double score = 0.0;
};

// Exact scan; results ascending by HSS, ties by question_id.
std::vector<Retrieved> retrieve(const FeatureVector& query_normalized, const EmbeddingVector& query_embedding,
                                const PseudocodeLibrary& library, const RetrievalConfig& config);

nlohmann::json to_json(const LibraryHeader& header);
LibraryHeader header_from_json(const nlohmann::json& j);
nlohmann::json to_json(const LibraryEntry& entry);
LibraryEntry entry_from_json(const nlohmann::json& j);

// JSON lines: header line, then one entry per line.
void save_library(const PseudocodeLibrary& library, const std::filesystem::path& path);
PseudocodeLibrary load_library(const std::filesystem::path& path);
// Appends entries to an existing library file (single writer).
void append_entries(const std::filesystem::path& path, const std::vector<LibraryEntry>& entries);

// Whole library as one JSON document {"header": ..., "entries": [...]}.
nlohmann::json export_library(const PseudocodeLibrary& library);
PseudocodeLibrary import_library(const nlohmann::json& doc);

}  // namespace pstar
