#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstar/backend.hpp"
#include "pstar/cost.hpp"
#include "pstar/dataset.hpp"
#include "pstar/evaluation.hpp"
#include "pstar/functions.hpp"
#include "pstar/judge.hpp"
#include "pstar/prompts.hpp"

namespace pstar {

struct ExecutedStep {
  FunctionId function = FunctionId::RR;
  std::string text;
  std::size_t token_count = 0;
  std::optional<std::string> extracted;  // OA steps only
};

struct ExecutionTranscript {
  std::string question_id;
  PathFunctions path;  // as executed, including an appended OA
  bool oa_appended = false;
  bool direct = false;  // single prompt, no path
  std::vector<ExecutedStep> steps;
  std::string final_answer_text;
  std::optional<std::string> extracted_answer;  // from the final OA step
  std::optional<std::string> retrieved_from;    // library entry the path came from
  std::optional<double> retrieval_score;

  std::vector<std::size_t> token_counts() const;
};

nlohmann::json to_json(const ExecutionTranscript& t);
ExecutionTranscript transcript_from_json(const nlohmann::json& j);

struct ExecutionOptions {
  GenerationParams params = GenerationParams::eval_defaults();
  std::array<std::size_t, kFunctionCount> token_budgets = CostConfig{}.token_budgets;
  std::shared_ptr<const PromptTemplateSet> templates;  // defaults when null
  std::filesystem::path image_root;
  std::size_t workers = 1;
};

// Runs the path step by step; each prompt carries the question, the image when
// present and every earlier response. Appends OA when the path does not end in
// one. `extracted_answer` stays empty when the OA text has no parseable answer.
ExecutionTranscript run_path(const DatasetRecord& question, const PathFunctions& path,
                             const VisionLanguageModel& backend, const ExecutionOptions& options = {});

// As run_path, but throws ExtractionFailed when no answer can be extracted.
ExecutionTranscript execute_path(const DatasetRecord& question, const PathFunctions& path,
                                 const VisionLanguageModel& backend, const ExecutionOptions& options = {});

// One direct prompt, no pseudocode guidance.
ExecutionTranscript run_direct(const DatasetRecord& question, const VisionLanguageModel& backend,
                               const ExecutionOptions& options = {});

struct FixedPathReport {
  std::optional<PathFunctions> path;  // nullopt: vanilla
  std::size_t total = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  std::vector<JudgedResult> results;
  std::vector<ExecutionTranscript> transcripts;
};

FixedPathReport run_fixed_path_eval(const std::vector<DatasetRecord>& dataset, const std::optional<PathFunctions>& path,
                                    const VisionLanguageModel& backend, const ExecutionOptions& options = {});

enum class Transition { CorrectCorrect, CorrectWrong, WrongCorrect, WrongWrong };
std::string_view to_string(Transition t);

struct ConsistencyReport {
  PathFunctions path;
  std::size_t total = 0;
  std::array<std::size_t, 4> counts{};  // indexed by Transition
  std::vector<std::pair<std::string, Transition>> per_record;

  double ratio(Transition t) const;
};

// The fixed two-round path "RR() OA() SR() RR() OA()".
PathFunctions consistency_path();

ConsistencyReport run_consistency(const std::vector<DatasetRecord>& dataset, const VisionLanguageModel& backend,
                                  const ExecutionOptions& options = {});

nlohmann::json to_json(const FixedPathReport& r);
nlohmann::json to_json(const ConsistencyReport& r);

}  // namespace pstar
