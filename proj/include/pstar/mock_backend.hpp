#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstar/backend.hpp"

namespace pstar {

// Deterministic scripted model. Script keys are "<question id>|<path>", where
// <path> is either the full canonical prefix ("SA() RR() OA()") or just the
// current call ("OA()"); "*" matches any question id. Lookup order:
//   id|prefix, id|last call, *|prefix, *|last call, default.
// Script files are JSON: {"default": "...", "responses": {"q1|OA()": "B", ...}}.
struct MockScript {
  std::map<std::string, std::string> responses;
  std::string fallback = "I am not sure.";

  static MockScript from_json(const nlohmann::json& script);
  static MockScript from_file(const std::filesystem::path& path);
  nlohmann::json to_json() const;
};

class MockBackend final : public VisionLanguageModel {
 public:
  struct Call {
    RequestKey key;
    std::string prompt;  // text of the final user turn
    bool had_image = false;
    std::string response;
  };

  MockBackend() = default;
  explicit MockBackend(MockScript script) : script_(std::move(script)) {}

  void set(const std::string& key, std::string response);
  void set_default(std::string response) { script_.fallback = std::move(response); }
  const MockScript& script() const noexcept { return script_; }

  std::string identifier() const override { return "mock"; }

  std::size_t call_count() const noexcept { return call_count_.load(); }
  std::vector<Call> calls() const;
  void clear_calls();

  // Response the script gives for a key, without recording a call.
  const std::string& lookup(const RequestKey& key) const;

 protected:
  std::string complete(const std::vector<ChatTurn>& history, const GenerationParams& params,
                       const RequestKey& key) const override;

 private:
  MockScript script_;
  mutable std::atomic<std::size_t> call_count_{0};
  mutable std::mutex mu_;
  mutable std::vector<Call> calls_;
};

}  // namespace pstar
