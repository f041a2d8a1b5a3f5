#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pstar {

// The nine abstract reasoning actions.
enum class FunctionId {
  VA,  // Visual Analysis
  SA,  // System Analysis
  RR,  // Regular Reasoning
  SR,  // Self-Reflection
  NA,  // Numerical Analysis
  SP,  // Simplify Problem
  KI,  // Knowledge Injection
  OA,  // Output Answer
  ER,  // Error Reasoning (also accepted as "EA")
};

inline constexpr std::size_t kFunctionCount = 9;
inline constexpr std::array<FunctionId, kFunctionCount> kAllFunctions = {
    FunctionId::VA, FunctionId::SA, FunctionId::RR, FunctionId::SR, FunctionId::NA,
    FunctionId::SP, FunctionId::KI, FunctionId::OA, FunctionId::ER};

inline constexpr std::size_t index_of(FunctionId f) { return static_cast<std::size_t>(f); }

std::string_view name_of(FunctionId f);
std::string_view description_of(FunctionId f);
// Case-insensitive; "EA" maps to ER.
std::optional<FunctionId> parse_function_name(std::string_view name);

using PathFunctions = std::vector<FunctionId>;

// Parses "SA() RR() OA()" (case-insensitive, any whitespace between calls).
// Throws ParseError naming the offending token.
PathFunctions parse_path(std::string_view text);
// Canonical form: "SA() RR() OA()".
std::string format_path(const PathFunctions& path);

}  // namespace pstar
