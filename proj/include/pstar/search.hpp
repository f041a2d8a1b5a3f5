#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstar/backend.hpp"
#include "pstar/cost.hpp"
#include "pstar/dataset.hpp"
#include "pstar/judge.hpp"
#include "pstar/prompts.hpp"

namespace pstar {

struct ReasoningPath {
  PathFunctions functions;
  std::string source_question_id;
  std::string final_answer;
  std::size_t attempts = 0;  // generate calls spent across all tries
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void emit(const nlohmann::json& event) = 0;
};

// Writes one JSON object per line; safe to share between searches.
class JsonLinesTrace final : public TraceSink {
 public:
  explicit JsonLinesTrace(std::ostream& out) : out_(out) {}
  void emit(const nlohmann::json& event) override;

 private:
  std::ostream& out_;
  std::mutex mu_;
};

struct SearchOptions {
  GenerationParams params = GenerationParams::build_defaults();
  std::shared_ptr<const PromptTemplateSet> templates;  // defaults when null
  std::filesystem::path image_root;
  TraceSink* trace = nullptr;
  // Scan the whole frontier on every pop and throw InvariantViolation if the
  // popped entry is not the (f, insertion order) minimum.
  bool check_frontier = false;
};

struct SearchStats {
  std::size_t attempts_total = 0;
  std::vector<std::size_t> attempts_per_try;
  std::size_t max_depth_reached = 0;
  std::size_t frontier_checks = 0;
  std::vector<double> popped_f;  // f of every pop, in order
};

struct SearchResult {
  std::optional<ReasoningPath> path;  // nullopt: unsolved after every retry
  SearchState state;                  // the accepted state when solved
  SearchStats stats;

  bool solved() const noexcept { return path.has_value(); }
};

// A* over (state, next function) pairs ordered by f = g + h, ties broken by
// insertion order. Each pop costs one generate call under the function's token
// budget; OA responses are goal-tested by the judge and the search stops at the
// first accepted one. Children get all nine functions while depth < max_depth.
// A try ends after max_attempts calls; the search restarts from an empty
// frontier up to `retries` more times. Backend errors propagate.
SearchResult search(const DatasetRecord& question, const VisionLanguageModel& backend, const CostConfig& config,
                    const AnswerJudge& judge, const SearchOptions& options = {});

}  // namespace pstar
