#pragma once

#include <array>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pstar/functions.hpp"

namespace pstar {

struct AbstractFunction {
  FunctionId id = FunctionId::RR;
  double lambda = 1.0;
  std::size_t token_budget = 400;
};

struct CostConfig {
  double expected_tokens = 3000.0;  // M
  // VA SA RR SR NA SP KI OA ER
  std::array<double, kFunctionCount> lambdas = {1.6, 1.6, 1.0, 1.8, 1.6, 1.6, 1.6, 1.6, 1.8};
  std::array<std::size_t, kFunctionCount> token_budgets = {400, 400, 400, 400, 400, 400, 400, 100, 400};
  std::size_t max_attempts = 100;  // backend generate calls per try
  std::size_t max_depth = 5;
  std::size_t retries = 2;  // fresh restarts after the first try
  double usefulness_floor = 1e-3;

  double lambda(FunctionId f) const { return lambdas[index_of(f)]; }
  std::size_t budget(FunctionId f) const { return token_budgets[index_of(f)]; }
  AbstractFunction function(FunctionId f) const { return {f, lambda(f), budget(f)}; }

  // Throws Usage on M <= 0, lambda < 1, zero attempts/depth or a floor outside (0, 1].
  void validate() const;
};

// Lowercase whitespace-delimited tokens with ASCII punctuation trimmed from
// both ends; tokens that are pure punctuation vanish.
std::vector<std::string> tokenize_for_cost(std::string_view text);

// Share of token occurrences in `response` whose type never appeared in any
// prior response, clamped below by `floor`. No priors means 1.
double usefulness(std::span<const std::string> response, const std::set<std::string>& prior_types,
                  bool has_priors, double floor = 1e-3);
double usefulness(std::span<const std::string> response,
                  std::span<const std::vector<std::string>> prior_responses, double floor = 1e-3);

struct StepResponse {
  AbstractFunction function;
  std::string text;
  std::size_t token_count = 0;
  double usefulness = 1.0;
};

// A partial reasoning path.
class SearchState {
 public:
  SearchState() = default;

  // New state with one more step; tokenizes `text`, scores usefulness against
  // every earlier step and accumulates g. Throws InvariantViolation if the
  // response exceeds the function's budget.
  SearchState extend(FunctionId fn, std::string text, const CostConfig& config) const;

  const std::vector<StepResponse>& steps() const noexcept { return steps_; }
  std::size_t depth() const noexcept { return steps_.size(); }
  std::size_t generated_tokens() const noexcept { return generated_tokens_; }
  double g() const noexcept { return g_cost_; }
  PathFunctions functions() const;

 private:
  std::vector<StepResponse> steps_;
  std::set<std::string> seen_types_;
  std::size_t generated_tokens_ = 0;
  double g_cost_ = 0.0;
};

// Accumulated cost: sum of lambda * len / usefulness over the steps.
double g_cost(const SearchState& state, const CostConfig& config);
// Model-free estimate for applying `candidate` next: its own budgeted cost
// plus the remaining expected tokens at unit cost, clamped at zero.
double h_cost(const SearchState& state, FunctionId candidate, const CostConfig& config);
double f_cost(const SearchState& state, FunctionId candidate, const CostConfig& config);

// Rebuilds a state from raw step texts.
SearchState replay(const PathFunctions& functions, std::span<const std::string> texts, const CostConfig& config);

}  // namespace pstar
