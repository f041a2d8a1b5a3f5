#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "pstar/backend.hpp"
#include "pstar/canny.hpp"
#include "pstar/cost.hpp"
#include "pstar/library.hpp"
#include "pstar/prompts.hpp"

namespace pstar {

struct BackendSettings {
  std::string kind = "mock";  // "mock" or "http"
  std::filesystem::path mock_script;
  std::string endpoint;  // chat-completions URL
  std::string model;
  std::string api_key_env = "PSTAR_API_KEY";
  std::string embedding_endpoint;  // empty: hashing embedder
  std::string embedding_model;
  std::size_t embedding_dim = 256;  // hashing embedder only
  std::size_t retries = 2;
  int timeout_seconds = 120;
  bool send_repetition_penalty = true;
};

// Every knob of the pipeline. File format is JSON; each section and key is
// optional and falls back to the defaults below, e.g.
//   {"backend": {"kind": "http", "endpoint": "..."}, "cost": {"M": 3000},
//    "retrieval": {"alpha": 0.5}, "seed_count": 500}
struct PipelineConfig {
  BackendSettings backend;
  CostConfig cost;
  RetrievalConfig retrieval;
  GenerationParams build_params = GenerationParams::build_defaults();
  GenerationParams eval_params = GenerationParams::eval_defaults();
  CannyParams canny;
  std::filesystem::path templates_path;  // empty: built-in templates
  std::size_t seed_count = 500;
  std::size_t workers = 1;

  // Relative paths inside the document resolve against `base_dir`.
  static PipelineConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static PipelineConfig from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  void validate() const;
  std::shared_ptr<const PromptTemplateSet> load_templates() const;
};

std::unique_ptr<VisionLanguageModel> make_backend(const BackendSettings& settings);
std::unique_ptr<TextEmbedder> make_embedder(const BackendSettings& settings);

}  // namespace pstar
