#include "pstar/http_backend.hpp"

#include <httplib.h>

#include "pstar/dataset.hpp"
#include "pstar/error.hpp"
#include "pstar/text.hpp"

namespace pstar {
namespace {

std::string mime_type_for(const std::filesystem::path& p) {
  const auto ext = text::to_lower(p.extension().string());
  if (ext == ".png") return "image/png";
  if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
  throw Error(ErrorKind::ImageDecode, "unsupported image type: " + p.string());
}

bool retryable_status(int status) { return status == 429 || status >= 500; }

}  // namespace

ParsedUrl parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw Error(ErrorKind::Usage, "endpoint URL needs a scheme: " + url);
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw Error(ErrorKind::Usage, "unsupported URL scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
    out.path = "/";
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path = url.substr(path_start);
  }
  return out;
}

std::string base64_encode(std::string_view bytes) {
  static constexpr char table[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const auto n = (std::uint32_t{static_cast<unsigned char>(bytes[i])} << 16) |
                   (std::uint32_t{static_cast<unsigned char>(bytes[i + 1])} << 8) |
                   static_cast<unsigned char>(bytes[i + 2]);
    out += table[(n >> 18) & 63];
    out += table[(n >> 12) & 63];
    out += table[(n >> 6) & 63];
    out += table[n & 63];
  }
  if (const auto rest = bytes.size() - i; rest > 0) {
    std::uint32_t n = std::uint32_t{static_cast<unsigned char>(bytes[i])} << 16;
    if (rest == 2) n |= std::uint32_t{static_cast<unsigned char>(bytes[i + 1])} << 8;
    out += table[(n >> 18) & 63];
    out += table[(n >> 12) & 63];
    out += rest == 2 ? table[(n >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

nlohmann::json build_chat_request(const std::vector<ChatTurn>& history, const GenerationParams& params,
                                  const std::string& model, bool send_repetition_penalty) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& turn : history) {
    nlohmann::json m = {{"role", to_string(turn.role)}};
    if (turn.image) {
      const auto data = read_file(*turn.image);
      const auto url = "data:" + mime_type_for(*turn.image) + ";base64," + base64_encode(data);
      m["content"] = nlohmann::json::array({{{"type", "text"}, {"text", turn.text}},
                                            {{"type", "image_url"}, {"image_url", {{"url", url}}}}});
    } else {
      m["content"] = turn.text;
    }
    messages.push_back(std::move(m));
  }
  nlohmann::json body = {{"model", model},
                         {"messages", std::move(messages)},
                         {"max_tokens", params.max_tokens},
                         {"temperature", params.temperature},
                         {"top_p", params.top_p}};
  if (send_repetition_penalty) body["repetition_penalty"] = params.repetition_penalty;
  return body;
}

nlohmann::json post_json(const HttpEndpoint& endpoint, const nlohmann::json& body, const LogSink& log) {
  const auto url = parse_url(endpoint.url);
  httplib::Headers headers;
  if (!endpoint.api_key.empty()) headers.emplace("Authorization", "Bearer " + endpoint.api_key);
  const auto payload = body.dump();

  std::string last_failure;
  for (std::size_t attempt = 0; attempt <= endpoint.retries; ++attempt) {
    if (attempt > 0 && log) {
      log("retry " + std::to_string(attempt) + "/" + std::to_string(endpoint.retries) + " for " + endpoint.url +
          " after " + last_failure);
    }
    httplib::Client client(url.scheme_host_port);
    client.set_connection_timeout(endpoint.timeout_seconds);
    client.set_read_timeout(endpoint.timeout_seconds);
    client.set_write_timeout(endpoint.timeout_seconds);
    auto res = client.Post(url.path, headers, payload, "application/json");
    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) {
      try {
        return nlohmann::json::parse(res->body);
      } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorKind::MalformedResponse, std::string("response is not JSON: ") + e.what());
      }
    }
    last_failure = "HTTP " + std::to_string(res->status);
    if (!retryable_status(res->status)) break;
  }
  throw Error(ErrorKind::BackendUnavailable, endpoint.url + ": " + last_failure);
}

HttpChatBackend::HttpChatBackend(HttpEndpoint endpoint, bool send_repetition_penalty, LogSink log)
    : endpoint_(std::move(endpoint)), send_repetition_penalty_(send_repetition_penalty), log_(std::move(log)) {
  parse_url(endpoint_.url);
}

std::string HttpChatBackend::complete(const std::vector<ChatTurn>& history, const GenerationParams& params,
                                      const RequestKey&) const {
  const auto reply = post_json(endpoint_, build_chat_request(history, params, endpoint_.model, send_repetition_penalty_), log_);
  try {
    const auto& content = reply.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error(ErrorKind::MalformedResponse, "message content is not a string");
    return content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("unexpected completion shape: ") + e.what());
  }
}

HttpEmbedder::HttpEmbedder(HttpEndpoint endpoint, LogSink log)
    : endpoint_(std::move(endpoint)), log_(std::move(log)) {
  parse_url(endpoint_.url);
}

EmbeddingVector HttpEmbedder::embed(std::string_view t) const {
  if (text::trim(t).empty()) throw Error(ErrorKind::EmptyText, "cannot embed empty text");
  const nlohmann::json body = {{"model", endpoint_.model}, {"input", std::string(t)}};
  const auto reply = post_json(endpoint_, body, log_);
  try {
    EmbeddingVector v;
    v.values = reply.at("data").at(0).at("embedding").get<std::vector<double>>();
    if (v.values.empty()) throw Error(ErrorKind::MalformedResponse, "empty embedding");
    return v;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("unexpected embedding shape: ") + e.what());
  }
}

}  // namespace pstar
