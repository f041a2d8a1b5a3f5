#include "pstar/functions.hpp"

#include <cctype>

#include "pstar/error.hpp"
#include "pstar/text.hpp"

namespace pstar {

std::string_view name_of(FunctionId f) {
  static constexpr std::array<std::string_view, kFunctionCount> names = {
      "VA", "SA", "RR", "SR", "NA", "SP", "KI", "OA", "ER"};
  return names[index_of(f)];
}

std::string_view description_of(FunctionId f) {
  static constexpr std::array<std::string_view, kFunctionCount> names = {
      "Visual Analysis",    "System Analysis",     "Regular Reasoning",
      "Self-Reflection",    "Numerical Analysis",  "Simplify Problem",
      "Knowledge Injection", "Output Answer",      "Error Reasoning"};
  return names[index_of(f)];
}

std::optional<FunctionId> parse_function_name(std::string_view name) {
  std::string upper(name);
  for (auto& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (upper == "EA") return FunctionId::ER;
  for (auto f : kAllFunctions) {
    if (name_of(f) == upper) return f;
  }
  return std::nullopt;
}

PathFunctions parse_path(std::string_view text) {
  PathFunctions out;
  std::size_t i = 0;
  const auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip_ws();
  while (i < text.size()) {
    const std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '(') ++i;
    const auto name = text.substr(start, i - start);
    if (i + 1 >= text.size() || text[i] != '(' || text[i + 1] != ')') {
      std::size_t end = i;
      while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
      throw Error(ErrorKind::ParseError,
                  "expected FN() call, got '" + std::string(text.substr(start, end - start)) + "'");
    }
    const auto fn = parse_function_name(name);
    if (!fn) throw Error(ErrorKind::ParseError, "unknown abstract function '" + std::string(name) + "'");
    out.push_back(*fn);
    i += 2;
    if (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) {
      std::size_t end = i;
      while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end]))) ++end;
      throw Error(ErrorKind::ParseError, "unexpected '" + std::string(text.substr(i, end - i)) + "' after call");
    }
    skip_ws();
  }
  if (out.empty()) throw Error(ErrorKind::ParseError, "empty path");
  return out;
}

std::string format_path(const PathFunctions& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (i != 0) out.push_back(' ');
    out += name_of(path[i]);
    out += "()";
  }
  return out;
}

}  // namespace pstar
