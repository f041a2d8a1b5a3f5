#include "pstar/backend.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <mutex>

#include "pstar/cost.hpp"
#include "pstar/error.hpp"
#include "pstar/text.hpp"

namespace pstar {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

void GenerationParams::validate() const {
  if (max_tokens < 1) throw Error(ErrorKind::Usage, "max_tokens must be >= 1");
  if (!(temperature >= 0.0)) throw Error(ErrorKind::Usage, "temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw Error(ErrorKind::Usage, "top_p must be in (0, 1]");
  if (!(repetition_penalty > 0.0)) throw Error(ErrorKind::Usage, "repetition_penalty must be > 0");
}

Generation enforce_token_limit(std::string_view text, std::size_t max_tokens) {
  Generation out;
  std::size_t i = 0;
  std::size_t cut = 0;
  std::size_t count = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    const std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (b == i) break;
    if (tokenize_for_cost(text.substr(b, i - b)).empty()) continue;
    if (count == max_tokens) {
      out.text = std::string(text.substr(0, cut));
      out.token_count = count;
      return out;
    }
    ++count;
    cut = i;
  }
  out.text = std::string(text);
  out.token_count = count;
  return out;
}

void validate_history(const std::vector<ChatTurn>& history) {
  if (history.empty()) throw Error(ErrorKind::InvalidHistory, "empty chat history");
  std::size_t i = 0;
  if (history.front().role == Role::System) {
    if (history.front().image) throw Error(ErrorKind::InvalidHistory, "system turn cannot carry an image");
    ++i;
  }
  if (i == history.size()) throw Error(ErrorKind::InvalidHistory, "history has no user turn");
  Role expected = Role::User;
  for (; i < history.size(); ++i) {
    if (history[i].role != expected) {
      throw Error(ErrorKind::InvalidHistory, "turn " + std::to_string(i) + " breaks user/assistant alternation");
    }
    expected = expected == Role::User ? Role::Assistant : Role::User;
  }
  if (history.back().role != Role::User) throw Error(ErrorKind::InvalidHistory, "history must end with a user turn");
}

void log_to_stderr(std::string_view line) {
  static std::mutex mu;
  std::lock_guard lock(mu);
  std::cerr << "[pstar] " << line << '\n';
}

Generation VisionLanguageModel::generate(const std::vector<ChatTurn>& history, const GenerationParams& params,
                                         const RequestKey& key) const {
  validate_history(history);
  params.validate();
  return enforce_token_limit(complete(history, params, key), params.max_tokens);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "embedding dims " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

HashingEmbedder::HashingEmbedder(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw Error(ErrorKind::Usage, "embedding dimension must be >= 1");
}

std::size_t HashingEmbedder::bucket_of(std::string_view word) const {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : word) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return static_cast<std::size_t>(h % dim_);
}

EmbeddingVector HashingEmbedder::embed(std::string_view t) const {
  const auto ws = text::words(t);
  if (ws.empty()) throw Error(ErrorKind::EmptyText, "cannot embed text without words");
  EmbeddingVector v;
  v.values.assign(dim_, 0.0);
  for (const auto& w : ws) v.values[bucket_of(w)] += 1.0;
  double norm = 0.0;
  for (double x : v.values) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v.values) x /= norm;
  return v;
}

std::string HashingEmbedder::identifier() const { return "hashing-" + std::to_string(dim_); }

}  // namespace pstar
