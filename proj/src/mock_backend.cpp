#include "pstar/mock_backend.hpp"

#include "pstar/dataset.hpp"
#include "pstar/error.hpp"

namespace pstar {

MockScript MockScript::from_json(const nlohmann::json& script) {
  if (!script.is_object()) throw Error(ErrorKind::MalformedData, "mock script must be a JSON object");
  MockScript m;
  if (script.contains("default")) m.fallback = script.at("default").get<std::string>();
  if (script.contains("responses")) {
    for (const auto& [k, v] : script.at("responses").items()) {
      if (!v.is_string()) throw Error(ErrorKind::MalformedData, "mock response for '" + k + "' must be a string");
      m.responses[k] = v.get<std::string>();
    }
  }
  return m;
}

nlohmann::json MockScript::to_json() const { return {{"default", fallback}, {"responses", responses}}; }

MockScript MockScript::from_file(const std::filesystem::path& path) {
  try {
    return from_json(nlohmann::json::parse(read_file(path)));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedData, "mock script " + path.string() + ": " + e.what());
  }
}

void MockBackend::set(const std::string& key, std::string response) { script_.responses[key] = std::move(response); }

const std::string& MockBackend::lookup(const RequestKey& key) const {
  const auto space = key.path.rfind(' ');
  const std::string last = space == std::string::npos ? key.path : key.path.substr(space + 1);
  for (const auto& k : {key.question_id + "|" + key.path, key.question_id + "|" + last, "*|" + key.path,
                        "*|" + last}) {
    if (auto it = script_.responses.find(k); it != script_.responses.end()) return it->second;
  }
  return script_.fallback;
}

std::string MockBackend::complete(const std::vector<ChatTurn>& history, const GenerationParams&,
                                  const RequestKey& key) const {
  const auto& response = lookup(key);
  call_count_.fetch_add(1);
  std::lock_guard lock(mu_);
  calls_.push_back({key, history.back().text, history.back().image.has_value(), response});
  return response;
}

std::vector<MockBackend::Call> MockBackend::calls() const {
  std::lock_guard lock(mu_);
  return calls_;
}

void MockBackend::clear_calls() {
  std::lock_guard lock(mu_);
  calls_.clear();
  call_count_.store(0);
}

}  // namespace pstar
