#include "pstar/library.hpp"

#include <algorithm>
#include <fstream>

#include "pstar/error.hpp"
#include "pstar/sampler.hpp"

namespace pstar {

void validate_entry(const LibraryEntry& e, const LibraryHeader& header) {
  if (e.question_id.empty()) throw Error(ErrorKind::InvalidRecord, "library entry without question_id");
  if (!e.dfv.normalized) throw Error(ErrorKind::InvalidRecord, e.question_id + ": entry lacks a normalized DFV");
  if (e.path.functions.empty()) throw Error(ErrorKind::InvalidRecord, e.question_id + ": empty reasoning path");
  if (e.embedding.dim() != header.dim) {
    throw Error(ErrorKind::DimensionMismatch, e.question_id + ": embedding dim " + std::to_string(e.embedding.dim()) +
                                                  ", library dim " + std::to_string(header.dim));
  }
}

void PseudocodeLibrary::add(LibraryEntry entry) {
  validate_entry(entry, header_);
  entries_.push_back(std::move(entry));
}

const LibraryEntry* PseudocodeLibrary::find(const std::string& question_id) const {
  for (const auto& e : entries_) {
    if (e.question_id == question_id) return &e;
  }
  return nullptr;
}

void RetrievalConfig::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorKind::Usage, "alpha must be in [0, 1]");
  if (top_k == 0) throw Error(ErrorKind::Usage, "top_k must be >= 1");
}

double hss(const FeatureVector& a, const EmbeddingVector& ea, const FeatureVector& b, const EmbeddingVector& eb,
           double alpha) {
  return alpha * l2_distance(a, b) - (1.0 - alpha) * cosine_similarity(ea, eb);
}

double hss(const FeatureVector& query_normalized, const EmbeddingVector& query_embedding, const LibraryEntry& entry,
           double alpha) {
  if (!entry.dfv.normalized) throw Error(ErrorKind::MissingStats, entry.question_id + ": entry lacks a normalized DFV");
  return hss(query_normalized, query_embedding, *entry.dfv.normalized, entry.embedding, alpha);
}

std::vector<Retrieved> retrieve(const FeatureVector& query_normalized, const EmbeddingVector& query_embedding,
                                const PseudocodeLibrary& library, const RetrievalConfig& config) {
  config.validate();
  if (library.empty()) throw Error(ErrorKind::EmptyLibrary, "library has no entries");
  if (query_embedding.dim() != library.header().dim) {
    throw Error(ErrorKind::DimensionMismatch, "query embedding dim " + std::to_string(query_embedding.dim()) +
                                                  ", library dim " + std::to_string(library.header().dim));
  }
  std::vector<Retrieved> scored;
  scored.reserve(library.size());
  for (const auto& e : library.entries()) {
    scored.push_back({&e, hss(query_normalized, query_embedding, e, config.alpha)});
  }
  const auto k = std::min(config.top_k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(),
                    [](const Retrieved& a, const Retrieved& b) {
                      if (a.score != b.score) return a.score < b.score;
                      return a.entry->question_id < b.entry->question_id;
                    });
  scored.resize(k);
  return scored;
}

nlohmann::json to_json(const LibraryHeader& h) {
  return {{"kind", "pstar-library"}, {"schema", h.schema}, {"dim", h.dim}, {"stats", to_json(h.stats)}};
}

LibraryHeader header_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("schema")) throw Error(ErrorKind::MalformedData, "library header missing");
  LibraryHeader h;
  try {
    h.schema = j.at("schema").get<int>();
    if (h.schema != kLibrarySchemaVersion) {
      throw Error(ErrorKind::SchemaVersionMismatch, "library schema " + std::to_string(h.schema) + ", expected " +
                                                        std::to_string(kLibrarySchemaVersion));
    }
    h.dim = j.at("dim").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedData, std::string("library header: ") + e.what());
  }
  if (!j.contains("stats")) throw Error(ErrorKind::MissingStats, "library header lacks normalization stats");
  h.stats = stats_from_json(j.at("stats"));
  return h;
}

nlohmann::json to_json(const LibraryEntry& e) {
  return {{"question_id", e.question_id},
          {"question", e.question},
          {"dfv_raw", e.dfv.raw()},
          {"dfv_normalized", e.dfv.normalized ? nlohmann::json(*e.dfv.normalized) : nlohmann::json(nullptr)},
          {"embedding", e.embedding.values},
          {"path", format_path(e.path.functions)},
          {"final_answer", e.path.final_answer},
          {"attempts", e.path.attempts},
          {"g_cost", e.g_cost},
          {"created_at", e.created_at},
          {"backend", e.backend}};
}

LibraryEntry entry_from_json(const nlohmann::json& j) {
  try {
    LibraryEntry e;
    e.question_id = j.at("question_id").get<std::string>();
    e.question = j.at("question").get<std::string>();
    e.dfv = DifficultyFeatureVector::from_raw(j.at("dfv_raw").get<FeatureVector>());
    if (!j.at("dfv_normalized").is_null()) e.dfv.normalized = j.at("dfv_normalized").get<FeatureVector>();
    e.embedding.values = j.at("embedding").get<std::vector<double>>();
    e.path.functions = parse_path(j.at("path").get<std::string>());
    e.path.source_question_id = e.question_id;
    e.path.final_answer = j.at("final_answer").get<std::string>();
    e.path.attempts = j.at("attempts").get<std::size_t>();
    e.g_cost = j.at("g_cost").get<double>();
    e.created_at = j.at("created_at").get<std::string>();
    e.backend = j.at("backend").get<std::string>();
    return e;
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorKind::MalformedData, std::string("library entry: ") + ex.what());
  }
}

void save_library(const PseudocodeLibrary& library, const std::filesystem::path& path) {
  std::vector<nlohmann::json> rows;
  rows.reserve(library.size() + 1);
  rows.push_back(to_json(library.header()));
  for (const auto& e : library.entries()) rows.push_back(to_json(e));
  write_json_lines(rows, path);
}

PseudocodeLibrary load_library(const std::filesystem::path& path) {
  const auto rows = read_json_lines(path);
  if (rows.empty()) throw Error(ErrorKind::MalformedData, path.string() + ": missing library header");
  PseudocodeLibrary lib(header_from_json(rows.front()));
  for (std::size_t i = 1; i < rows.size(); ++i) lib.add(entry_from_json(rows[i]));
  return lib;
}

void append_entries(const std::filesystem::path& path, const std::vector<LibraryEntry>& entries) {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorKind::IoError, "cannot append to " + path.string());
  for (const auto& e : entries) out << to_json(e).dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

nlohmann::json export_library(const PseudocodeLibrary& library) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& e : library.entries()) entries.push_back(to_json(e));
  return {{"header", to_json(library.header())}, {"entries", std::move(entries)}};
}

PseudocodeLibrary import_library(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("header") || !doc.contains("entries") || !doc.at("entries").is_array()) {
    throw Error(ErrorKind::MalformedData, "library document needs 'header' and 'entries'");
  }
  PseudocodeLibrary lib(header_from_json(doc.at("header")));
  for (const auto& e : doc.at("entries")) lib.add(entry_from_json(e));
  return lib;
}

}  // namespace pstar
