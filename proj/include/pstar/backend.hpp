#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pstar {

enum class Role { System, User, Assistant };
std::string_view to_string(Role r);

struct ChatTurn {
  Role role = Role::User;
  std::string text;
  std::optional<std::filesystem::path> image;
};

struct GenerationParams {
  std::size_t max_tokens = 400;
  double temperature = 1.0;
  double top_p = 0.9;
  double repetition_penalty = 1.05;

  // Library construction sampling settings.
  static GenerationParams build_defaults() { return {400, 1.0, 0.9, 1.05}; }
  // Evaluation sampling settings.
  static GenerationParams eval_defaults() { return {400, 0.5, 0.9, 1.05}; }

  void validate() const;
};

// Identifies what a request is for. The HTTP backend ignores it; the mock uses
// it to look up scripted responses.
struct RequestKey {
  std::string question_id;
  std::string path;  // canonical prefix including the current call, e.g. "SA() RR()"; "direct" for vanilla
};

struct Generation {
  std::string text;
  std::size_t token_count = 0;
};

// Keeps the first `max_tokens` cost tokens of `text` (cutting after the last
// kept whitespace-delimited chunk).
Generation enforce_token_limit(std::string_view text, std::size_t max_tokens);

void validate_history(const std::vector<ChatTurn>& history);

using LogSink = std::function<void(std::string_view)>;
void log_to_stderr(std::string_view line);

// A vision-language model. Implementations must be safe to call from several
// threads at once.
class VisionLanguageModel {
 public:
  virtual ~VisionLanguageModel() = default;

  // Validates the history, calls the model and truncates the reply to
  // params.max_tokens.
  Generation generate(const std::vector<ChatTurn>& history, const GenerationParams& params,
                      const RequestKey& key) const;

  virtual std::string identifier() const = 0;

 protected:
  virtual std::string complete(const std::vector<ChatTurn>& history, const GenerationParams& params,
                               const RequestKey& key) const = 0;
};

struct EmbeddingVector {
  std::vector<double> values;
  std::size_t dim() const noexcept { return values.size(); }
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::string identifier() const = 0;
};

// Feature hashing of word counts (FNV-1a over lowercased words) into a fixed
// number of buckets, L2-normalized.
class HashingEmbedder final : public TextEmbedder {
 public:
  explicit HashingEmbedder(std::size_t dim = 256);
  EmbeddingVector embed(std::string_view text) const override;
  std::string identifier() const override;
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t bucket_of(std::string_view word) const;

 private:
  std::size_t dim_;
};

}  // namespace pstar
