#include "pstar/cost.hpp"

#include <algorithm>
#include <cctype>

#include "pstar/error.hpp"

namespace pstar {

void CostConfig::validate() const {
  if (!(expected_tokens > 0.0)) throw Error(ErrorKind::Usage, "expected total tokens M must be > 0");
  for (auto f : kAllFunctions) {
    if (!(lambda(f) >= 1.0)) {
      throw Error(ErrorKind::Usage, "cost coefficient for " + std::string(name_of(f)) + " must be >= 1");
    }
  }
  if (max_attempts == 0) throw Error(ErrorKind::Usage, "max_attempts must be >= 1");
  if (max_depth == 0) throw Error(ErrorKind::Usage, "max_depth must be >= 1");
  if (!(usefulness_floor > 0.0 && usefulness_floor <= 1.0)) {
    throw Error(ErrorKind::Usage, "usefulness floor must be in (0, 1]");
  }
}

std::vector<std::string> tokenize_for_cost(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t b = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t e = i;
    while (b < e && std::ispunct(static_cast<unsigned char>(text[b]))) ++b;
    while (e > b && std::ispunct(static_cast<unsigned char>(text[e - 1]))) --e;
    if (b == e) continue;
    std::string tok(text.substr(b, e - b));
    for (auto& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back(std::move(tok));
  }
  return out;
}

double usefulness(std::span<const std::string> response, const std::set<std::string>& prior_types,
                  bool has_priors, double floor) {
  if (response.empty()) return floor;
  if (!has_priors) return 1.0;
  std::size_t novel = 0;
  for (const auto& t : response) {
    if (!prior_types.contains(t)) ++novel;
  }
  const double u = static_cast<double>(novel) / static_cast<double>(response.size());
  return std::max(u, floor);
}

double usefulness(std::span<const std::string> response,
                  std::span<const std::vector<std::string>> prior_responses, double floor) {
  std::set<std::string> types;
  for (const auto& r : prior_responses) types.insert(r.begin(), r.end());
  return usefulness(response, types, !prior_responses.empty(), floor);
}

SearchState SearchState::extend(FunctionId fn, std::string text, const CostConfig& config) const {
  const auto tokens = tokenize_for_cost(text);
  const auto func = config.function(fn);
  if (tokens.size() > func.token_budget) {
    throw Error(ErrorKind::InvariantViolation, std::string(name_of(fn)) + " response has " +
                                                   std::to_string(tokens.size()) + " tokens, budget " +
                                                   std::to_string(func.token_budget));
  }
  SearchState next = *this;
  StepResponse step;
  step.function = func;
  step.text = std::move(text);
  step.token_count = tokens.size();
  step.usefulness = usefulness(tokens, seen_types_, !steps_.empty(), config.usefulness_floor);
  next.seen_types_.insert(tokens.begin(), tokens.end());
  next.generated_tokens_ += step.token_count;
  next.g_cost_ += func.lambda * static_cast<double>(step.token_count) / step.usefulness;
  next.steps_.push_back(std::move(step));
  return next;
}

PathFunctions SearchState::functions() const {
  PathFunctions p;
  p.reserve(steps_.size());
  for (const auto& s : steps_) p.push_back(s.function.id);
  return p;
}

double g_cost(const SearchState& state, const CostConfig& config) {
  double g = 0.0;
  for (const auto& s : state.steps()) {
    g += config.lambda(s.function.id) * static_cast<double>(s.token_count) / s.usefulness;
  }
  return g;
}

double h_cost(const SearchState& state, FunctionId candidate, const CostConfig& config) {
  if (state.depth() >= config.max_depth) {
    throw Error(ErrorKind::InvariantViolation, "cannot extend a state at the depth limit");
  }
  const auto budget = static_cast<double>(config.budget(candidate));
  const double remaining = config.expected_tokens - static_cast<double>(state.generated_tokens()) - budget;
  return config.lambda(candidate) * budget + std::max(0.0, remaining);
}

double f_cost(const SearchState& state, FunctionId candidate, const CostConfig& config) {
  return g_cost(state, config) + h_cost(state, candidate, config);
}

SearchState replay(const PathFunctions& functions, std::span<const std::string> texts, const CostConfig& config) {
  if (functions.size() != texts.size()) throw Error(ErrorKind::DimensionMismatch, "one text per function required");
  SearchState s;
  for (std::size_t i = 0; i < functions.size(); ++i) s = s.extend(functions[i], texts[i], config);
  return s;
}

}  // namespace pstar
