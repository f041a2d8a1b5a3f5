#include "pstar/pipeline.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "pstar/error.hpp"
#include "pstar/parallel.hpp"
#include "pstar/text.hpp"

namespace pstar {

FeatureExtraction extract_features(const Dataset& dataset, const CannyParams& canny, std::size_t workers) {
  if (dataset.records.empty()) throw Error(ErrorKind::EmptyDataset, "dataset has no records");
  FeatureExtraction out;
  out.rows = parallel_map(dataset.records.size(), workers, [&](std::size_t i) {
    const auto& r = dataset.records[i];
    FeatureRow row;
    row.id = r.id;
    try {
      row.dfv = compute_dfv(r, dataset.root, canny);
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::Data) throw;
      row.error = e.what();
    }
    return row;
  });
  std::vector<DifficultyFeatureVector> ok;
  for (const auto& row : out.rows) {
    if (row.dfv) ok.push_back(*row.dfv);
    else ++out.failures;
  }
  if (ok.size() >= 2) {
    out.stats = fit_normalization(std::span<const DifficultyFeatureVector>(ok));
    for (auto& row : out.rows) {
      if (row.dfv) row.dfv->normalized = apply_normalization(row.dfv->raw(), *out.stats);
    }
  }
  return out;
}

void write_feature_file(const FeatureExtraction& features, const std::filesystem::path& path) {
  std::vector<nlohmann::json> rows;
  for (const auto& r : features.rows) {
    nlohmann::json j = {{"id", r.id}};
    if (r.dfv) {
      j["raw"] = r.dfv->raw();
      j["normalized"] = r.dfv->normalized ? nlohmann::json(*r.dfv->normalized) : nlohmann::json(nullptr);
    } else {
      j["error"] = r.error.value_or("unknown error");
    }
    rows.push_back(std::move(j));
  }
  write_json_lines(rows, path);
}

std::vector<FeatureRow> read_feature_file(const std::filesystem::path& path) {
  std::vector<FeatureRow> out;
  for (const auto& j : read_json_lines(path)) {
    try {
      FeatureRow r;
      r.id = j.at("id").get<std::string>();
      if (j.contains("error")) {
        r.error = j.at("error").get<std::string>();
      } else {
        r.dfv = DifficultyFeatureVector::from_raw(j.at("raw").get<FeatureVector>());
        if (j.contains("normalized") && !j.at("normalized").is_null()) {
          r.dfv->normalized = j.at("normalized").get<FeatureVector>();
        }
      }
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::MalformedData, path.string() + ": " + e.what());
    }
  }
  return out;
}

void write_stats_file(const NormalizationStats& stats, const std::filesystem::path& path) {
  write_file(path, to_json(stats).dump(2) + "\n");
}

NormalizationStats read_stats_file(const std::filesystem::path& path) {
  try {
    return stats_from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::MissingStats, path.string() + ": " + e.what());
  }
}

SeedSampling sample_seeds(const std::vector<FeatureRow>& rows, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::Usage, "k must be >= 1");
  SeedSampling s;
  std::vector<FeatureVector> vectors;
  for (const auto& r : rows) {
    if (!r.dfv) continue;
    if (!r.dfv->normalized) throw Error(ErrorKind::MissingStats, r.id + ": feature row is not normalized");
    s.row_ids.push_back(r.id);
    vectors.push_back(*r.dfv->normalized);
  }
  if (vectors.empty()) throw Error(ErrorKind::EmptyInput, "no usable feature rows");
  s.selection = max_min_sample(vectors, k);
  for (auto i : s.selection.indices) s.seed_ids.push_back(s.row_ids[i]);
  if (vectors.size() >= 2) s.pca = pca_project(vectors, 2);
  return s;
}

std::string pca_csv(const SeedSampling& s) {
  std::ostringstream out;
  out << "index,x,y,selected\n";
  if (!s.pca) return out.str();
  std::vector<bool> selected(s.row_ids.size(), false);
  for (auto i : s.selection.indices) selected[i] = true;
  for (std::size_t i = 0; i < s.row_ids.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    out << i << ',' << text::format_double(s.pca->coordinates(r, 0)) << ','
        << text::format_double(s.pca->coordinates(r, 1)) << ',' << (selected[i] ? 1 : 0) << '\n';
  }
  return out.str();
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> ids;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (!t.empty()) ids.push_back(std::move(t));
  }
  return ids;
}

void write_id_list(const std::vector<std::string>& ids, const std::filesystem::path& path) {
  std::string out;
  for (const auto& id : ids) out += id + "\n";
  write_file(path, out);
}

std::filesystem::path progress_path_for(const std::filesystem::path& library_path) {
  return library_path.string() + ".progress.jsonl";
}

std::filesystem::path unsolved_path_for(const std::filesystem::path& library_path) {
  return library_path.string() + ".unsolved.json";
}

namespace {

bool same_stats(const NormalizationStats& a, const NormalizationStats& b) {
  return a.means == b.means && a.stds == b.stds && a.degenerate == b.degenerate;
}

}  // namespace

BuildReport build_library(const Dataset& dataset, const std::vector<std::string>& seed_ids,
                          const NormalizationStats& stats, const BuildContext& ctx,
                          const std::filesystem::path& library_path) {
  if (seed_ids.empty()) throw Error(ErrorKind::EmptyInput, "no seed ids");
  std::map<std::string, const DatasetRecord*> by_id;
  for (const auto& r : dataset.records) by_id[r.id] = &r;
  std::vector<const DatasetRecord*> seeds;
  for (const auto& id : seed_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error(ErrorKind::InvalidRecord, "seed '" + id + "' not in dataset");
    if (!it->second->answer) throw Error(ErrorKind::InvalidRecord, "seed '" + id + "' has no answer key");
    seeds.push_back(it->second);
  }

  std::set<std::string> solved;
  std::error_code ec;
  if (std::filesystem::exists(library_path, ec)) {
    const auto existing = load_library(library_path);
    if (!same_stats(existing.header().stats, stats)) {
      throw Error(ErrorKind::MalformedData, library_path.string() + " was built with different normalization stats");
    }
    for (const auto& e : existing.entries()) solved.insert(e.question_id);
  } else {
    LibraryHeader header;
    header.dim = ctx.embedder->embed(seeds.front()->question).dim();
    header.stats = stats;
    save_library(PseudocodeLibrary(header), library_path);
  }
  const auto header = load_library(library_path).header();

  const auto progress_path = progress_path_for(library_path);
  if (std::filesystem::exists(progress_path, ec)) {
    for (const auto& j : read_json_lines(progress_path)) {
      if (j.value("status", "") == "solved") solved.insert(j.at("id").get<std::string>());
    }
  }

  BuildReport report;
  std::vector<const DatasetRecord*> todo;
  for (const auto* s : seeds) {
    if (solved.contains(s->id)) ++report.skipped;
    else todo.push_back(s);
  }

  SearchOptions opts;
  opts.params = ctx.config.build_params;
  opts.templates = ctx.config.load_templates();
  opts.image_root = dataset.root;
  opts.trace = ctx.trace;
  const AnswerJudge judge;

  const std::size_t chunk = std::max<std::size_t>(1, ctx.config.workers);
  for (std::size_t start = 0; start < todo.size(); start += chunk) {
    const std::size_t n = std::min(chunk, todo.size() - start);
    auto results = parallel_map(n, ctx.config.workers, [&](std::size_t i) {
      return search(*todo[start + i], *ctx.backend, ctx.config.cost, judge, opts);
    });
    std::vector<LibraryEntry> entries;
    std::ofstream progress(progress_path, std::ios::app);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& rec = *todo[start + i];
      const auto& res = results[i];
      if (res.solved()) {
        LibraryEntry e;
        e.question_id = rec.id;
        e.question = rec.question;
        e.dfv = compute_dfv(rec, dataset.root, ctx.config.canny);
        e.dfv.normalized = apply_normalization(e.dfv.raw(), stats);
        e.embedding = ctx.embedder->embed(rec.question);
        e.path = *res.path;
        e.g_cost = res.state.g();
        e.created_at = ctx.created_at;
        e.backend = ctx.backend->identifier();
        validate_entry(e, header);
        entries.push_back(std::move(e));
        ++report.solved;
      } else {
        report.unsolved.push_back({rec.id, res.stats.attempts_total});
      }
      progress << nlohmann::json{{"id", rec.id},
                                 {"status", res.solved() ? "solved" : "unsolved"},
                                 {"attempts", res.stats.attempts_total}}
                      .dump()
               << '\n';
    }
    append_entries(library_path, entries);
    progress.flush();
    if (!progress) throw Error(ErrorKind::IoError, "cannot write " + progress_path.string());
  }

  nlohmann::json unsolved = nlohmann::json::array();
  for (const auto& u : report.unsolved) unsolved.push_back({{"id", u.id}, {"attempts", u.attempts}});
  write_file(unsolved_path_for(library_path), nlohmann::json{{"unsolved", unsolved}}.dump(2) + "\n");
  return report;
}

std::vector<ExecutionTranscript> infer(const std::vector<DatasetRecord>& questions,
                                       const std::filesystem::path& image_root, const PseudocodeLibrary& library,
                                       const InferContext& ctx) {
  if (library.empty()) throw Error(ErrorKind::EmptyLibrary, "library has no entries");
  if (questions.empty()) throw Error(ErrorKind::EmptyDataset, "no questions");
  ExecutionOptions opts;
  opts.params = ctx.config.eval_params;
  opts.token_budgets = ctx.config.cost.token_budgets;
  opts.templates = ctx.config.load_templates();
  opts.image_root = image_root;
  return parallel_map(questions.size(), ctx.config.workers, [&](std::size_t i) {
    const auto& q = questions[i];
    const auto dfv = compute_dfv(q, image_root, ctx.config.canny);
    const auto z = apply_normalization(dfv.raw(), library.header().stats);
    const auto emb = ctx.embedder->embed(q.question);
    const auto hit = retrieve(z, emb, library, ctx.config.retrieval).front();
    auto t = run_path(q, hit.entry->path.functions, *ctx.backend, opts);
    t.retrieved_from = hit.entry->question_id;
    t.retrieval_score = hit.score;
    return t;
  });
}

std::vector<JudgedResult> judge_transcripts(const std::vector<ExecutionTranscript>& transcripts,
                                            const std::vector<DatasetRecord>& dataset) {
  std::map<std::string, const DatasetRecord*> by_id;
  for (const auto& r : dataset) by_id[r.id] = &r;
  std::vector<JudgedResult> out;
  out.reserve(transcripts.size());
  for (const auto& t : transcripts) {
    const auto it = by_id.find(t.question_id);
    if (it == by_id.end()) throw Error(ErrorKind::InvalidRecord, "transcript for unknown question " + t.question_id);
    out.push_back(judge_prediction(*it->second, t.extracted_answer));
  }
  return out;
}

void write_transcripts(const std::vector<ExecutionTranscript>& transcripts, const std::filesystem::path& path) {
  std::vector<nlohmann::json> rows;
  rows.reserve(transcripts.size());
  for (const auto& t : transcripts) rows.push_back(to_json(t));
  write_json_lines(rows, path);
}

std::vector<ExecutionTranscript> read_transcripts(const std::filesystem::path& path) {
  std::vector<ExecutionTranscript> out;
  for (const auto& j : read_json_lines(path)) out.push_back(transcript_from_json(j));
  return out;
}

}  // namespace pstar
