#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pstar/backend.hpp"

namespace pstar {

struct HttpEndpoint {
  std::string url;  // e.g. "https://host/v1/chat/completions"
  std::string model;
  std::string api_key;  // sent as a bearer token when non-empty
  std::size_t retries = 2;
  int timeout_seconds = 120;
};

struct ParsedUrl {
  std::string scheme_host_port;  // "http://127.0.0.1:8080"
  std::string path;              // "/v1/chat/completions"
};
ParsedUrl parse_url(const std::string& url);

std::string base64_encode(std::string_view bytes);

// Chat-completions request body. Images are inlined as base64 data URLs.
nlohmann::json build_chat_request(const std::vector<ChatTurn>& history, const GenerationParams& params,
                                  const std::string& model, bool send_repetition_penalty);

// POSTs JSON with retries on transport failures, 429 and 5xx. Each retry is
// reported to `log`. Throws BackendUnavailable once the budget is spent.
nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body, const LogSink& log);

class HttpChatBackend final : public VisionLanguageModel {
 public:
  explicit HttpChatBackend(HttpEndpoint endpoint, bool send_repetition_penalty = true,
                           LogSink log = log_to_stderr);

  std::string identifier() const override { return "http:" + endpoint_.model; }

 protected:
  std::string complete(const std::vector<ChatTurn>& history, const GenerationParams& params,
                       const RequestKey& key) const override;

 private:
  HttpEndpoint endpoint_;
  bool send_repetition_penalty_;
  LogSink log_;
};

// OpenAI-style /embeddings client.
class HttpEmbedder final : public TextEmbedder {
 public:
  explicit HttpEmbedder(HttpEndpoint endpoint, LogSink log = log_to_stderr);
  EmbeddingVector embed(std::string_view text) const override;
  std::string identifier() const override { return "http:" + endpoint_.model; }

 private:
  HttpEndpoint endpoint_;
  LogSink log_;
};

}  // namespace pstar
