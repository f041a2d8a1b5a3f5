#include "pstar/config.hpp"

#include <cstdlib>

#include "pstar/dataset.hpp"
#include "pstar/error.hpp"
#include "pstar/http_backend.hpp"
#include "pstar/mock_backend.hpp"

namespace pstar {
namespace {

template <typename T>
void read_if(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

std::filesystem::path resolve(const nlohmann::json& j, const char* key, const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  std::filesystem::path p = j.at(key).get<std::string>();
  if (p.empty() || p.is_absolute()) return p;
  return base / p;
}

GenerationParams params_from_json(const nlohmann::json& j, GenerationParams p) {
  read_if(j, "max_tokens", p.max_tokens);
  read_if(j, "temperature", p.temperature);
  read_if(j, "top_p", p.top_p);
  read_if(j, "repetition_penalty", p.repetition_penalty);
  return p;
}

nlohmann::json params_to_json(const GenerationParams& p) {
  return {{"max_tokens", p.max_tokens},
          {"temperature", p.temperature},
          {"top_p", p.top_p},
          {"repetition_penalty", p.repetition_penalty}};
}

}  // namespace

PipelineConfig PipelineConfig::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error(ErrorKind::ParseError, "config must be a JSON object");
  PipelineConfig c;
  try {
    if (j.contains("backend")) {
      const auto& b = j.at("backend");
      read_if(b, "kind", c.backend.kind);
      c.backend.mock_script = resolve(b, "mock_script", base_dir);
      read_if(b, "endpoint", c.backend.endpoint);
      read_if(b, "model", c.backend.model);
      read_if(b, "api_key_env", c.backend.api_key_env);
      read_if(b, "embedding_endpoint", c.backend.embedding_endpoint);
      read_if(b, "embedding_model", c.backend.embedding_model);
      read_if(b, "embedding_dim", c.backend.embedding_dim);
      read_if(b, "retries", c.backend.retries);
      read_if(b, "timeout_seconds", c.backend.timeout_seconds);
      read_if(b, "send_repetition_penalty", c.backend.send_repetition_penalty);
    }
    if (j.contains("cost")) {
      const auto& k = j.at("cost");
      read_if(k, "M", c.cost.expected_tokens);
      read_if(k, "max_attempts", c.cost.max_attempts);
      read_if(k, "max_depth", c.cost.max_depth);
      read_if(k, "retries", c.cost.retries);
      read_if(k, "usefulness_floor", c.cost.usefulness_floor);
      for (const char* table : {"lambdas", "token_budgets"}) {
        if (!k.contains(table)) continue;
        for (const auto& [name, v] : k.at(table).items()) {
          const auto f = parse_function_name(name);
          if (!f) throw Error(ErrorKind::ParseError, std::string("config cost.") + table + ": unknown function " + name);
          if (std::string(table) == "lambdas") c.cost.lambdas[index_of(*f)] = v.get<double>();
          else c.cost.token_budgets[index_of(*f)] = v.get<std::size_t>();
        }
      }
    }
    if (j.contains("retrieval")) {
      read_if(j.at("retrieval"), "alpha", c.retrieval.alpha);
      read_if(j.at("retrieval"), "top_k", c.retrieval.top_k);
    }
    if (j.contains("build_params")) c.build_params = params_from_json(j.at("build_params"), c.build_params);
    if (j.contains("eval_params")) c.eval_params = params_from_json(j.at("eval_params"), c.eval_params);
    if (j.contains("canny")) {
      const auto& k = j.at("canny");
      read_if(k, "gaussian_size", c.canny.gaussian_size);
      read_if(k, "sigma", c.canny.sigma);
      read_if(k, "low_threshold", c.canny.low_threshold);
      read_if(k, "high_threshold", c.canny.high_threshold);
    }
    c.templates_path = resolve(j, "templates", base_dir);
    read_if(j, "seed_count", c.seed_count);
    read_if(j, "workers", c.workers);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ParseError, std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig PipelineConfig::from_file(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::ParseError, path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::json PipelineConfig::to_json() const {
  nlohmann::json lambdas = nlohmann::json::object();
  nlohmann::json budgets = nlohmann::json::object();
  for (auto f : kAllFunctions) {
    lambdas[std::string(name_of(f))] = cost.lambda(f);
    budgets[std::string(name_of(f))] = cost.budget(f);
  }
  return {{"backend",
           {{"kind", backend.kind},
            {"mock_script", backend.mock_script.string()},
            {"endpoint", backend.endpoint},
            {"model", backend.model},
            {"api_key_env", backend.api_key_env},
            {"embedding_endpoint", backend.embedding_endpoint},
            {"embedding_model", backend.embedding_model},
            {"embedding_dim", backend.embedding_dim},
            {"retries", backend.retries},
            {"timeout_seconds", backend.timeout_seconds},
            {"send_repetition_penalty", backend.send_repetition_penalty}}},
          {"cost",
           {{"M", cost.expected_tokens},
            {"lambdas", lambdas},
            {"token_budgets", budgets},
            {"max_attempts", cost.max_attempts},
            {"max_depth", cost.max_depth},
            {"retries", cost.retries},
            {"usefulness_floor", cost.usefulness_floor}}},
          {"retrieval", {{"alpha", retrieval.alpha}, {"top_k", retrieval.top_k}}},
          {"build_params", params_to_json(build_params)},
          {"eval_params", params_to_json(eval_params)},
          {"canny",
           {{"gaussian_size", canny.gaussian_size},
            {"sigma", canny.sigma},
            {"low_threshold", canny.low_threshold},
            {"high_threshold", canny.high_threshold}}},
          {"templates", templates_path.string()},
          {"seed_count", seed_count},
          {"workers", workers}};
}

void PipelineConfig::validate() const {
  if (backend.kind != "mock" && backend.kind != "http") {
    throw Error(ErrorKind::Usage, "backend kind must be 'mock' or 'http', got '" + backend.kind + "'");
  }
  cost.validate();
  retrieval.validate();
  build_params.validate();
  eval_params.validate();
  if (seed_count == 0) throw Error(ErrorKind::Usage, "seed_count must be >= 1");
  if (workers == 0) throw Error(ErrorKind::Usage, "workers must be >= 1");
}

std::shared_ptr<const PromptTemplateSet> PipelineConfig::load_templates() const {
  if (templates_path.empty()) return std::make_shared<const PromptTemplateSet>(PromptTemplateSet::defaults());
  return std::make_shared<const PromptTemplateSet>(PromptTemplateSet::from_file(templates_path));
}

namespace {

HttpEndpoint endpoint_for(const BackendSettings& s, const std::string& url, const std::string& model) {
  HttpEndpoint e;
  e.url = url;
  e.model = model;
  e.retries = s.retries;
  e.timeout_seconds = s.timeout_seconds;
  if (!s.api_key_env.empty()) {
    if (const char* key = std::getenv(s.api_key_env.c_str())) e.api_key = key;
  }
  return e;
}

}  // namespace

std::unique_ptr<VisionLanguageModel> make_backend(const BackendSettings& s) {
  if (s.kind == "mock") {
    if (s.mock_script.empty()) return std::make_unique<MockBackend>();
    return std::make_unique<MockBackend>(MockScript::from_file(s.mock_script));
  }
  if (s.kind == "http") {
    if (s.endpoint.empty()) throw Error(ErrorKind::Usage, "http backend needs an endpoint");
    return std::make_unique<HttpChatBackend>(endpoint_for(s, s.endpoint, s.model), s.send_repetition_penalty);
  }
  throw Error(ErrorKind::Usage, "unknown backend kind '" + s.kind + "'");
}

std::unique_ptr<TextEmbedder> make_embedder(const BackendSettings& s) {
  if (s.embedding_endpoint.empty()) return std::make_unique<HashingEmbedder>(s.embedding_dim);
  return std::make_unique<HttpEmbedder>(endpoint_for(s, s.embedding_endpoint, s.embedding_model));
}

}  // namespace pstar
