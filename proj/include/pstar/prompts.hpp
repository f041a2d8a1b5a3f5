#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstar/backend.hpp"
#include "pstar/cost.hpp"
#include "pstar/dataset.hpp"
#include "pstar/functions.hpp"

namespace pstar {

// Instruction templates, one per abstract function plus the direct (no path)
// prompt. Placeholders: {{question}}, {{choices}}, {{transcript}}, {{image}},
// {{answer_format}}. Unknown placeholders are rejected at load time.
struct PromptTemplateSet {
  std::string system;  // optional leading system turn; empty = none
  std::array<std::string, kFunctionCount> functions;
  std::string direct;

  static PromptTemplateSet defaults();
  // JSON: {"system": "...", "direct": "...", "functions": {"VA": "...", ...}}
  static PromptTemplateSet from_json(const nlohmann::json& j);
  static PromptTemplateSet from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  const std::string& for_function(FunctionId f) const { return functions[index_of(f)]; }
};

struct PromptContext {
  const DatasetRecord* record = nullptr;
  std::optional<std::filesystem::path> image;  // resolved path, attached when present
  const std::vector<StepResponse>* prior = nullptr;
};

std::string render_template(const std::string& tmpl, const PromptContext& ctx);
std::string format_choices(const std::vector<std::string>& choices);
std::string format_transcript(const std::vector<StepResponse>& steps);

// One user turn (after the optional system turn) holding the rendered
// instruction for `fn` with the full prior transcript; the image rides along
// on every step when the record has one.
std::vector<ChatTurn> build_step_prompt(const PromptTemplateSet& templates, const PromptContext& ctx, FunctionId fn);
std::vector<ChatTurn> build_direct_prompt(const PromptTemplateSet& templates, const PromptContext& ctx);

}  // namespace pstar
