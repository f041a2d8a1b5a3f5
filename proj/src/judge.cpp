#include "pstar/judge.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <regex>

#include "pstar/text.hpp"

namespace pstar {
namespace {

constexpr double kNumericRelTol = 1e-4;

// Position just past the last "answer is" / "answer:" marker, or npos.
std::size_t after_answer_marker(const std::string& lower) {
  std::size_t best = std::string::npos;
  for (const std::string marker : {"answer is", "answer:"}) {
    const auto p = lower.rfind(marker);
    if (p != std::string::npos && (best == std::string::npos || p + marker.size() > best)) {
      best = p + marker.size();
    }
  }
  return best;
}

std::string strip_digit_commas(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == ',' && i > 0 && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i - 1])) &&
        std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
      continue;
    }
    out.push_back(s[i]);
  }
  return out;
}

std::optional<double> parse_number(std::string_view s) {
  double v = 0.0;
  auto begin = s.data();
  if (!s.empty() && s.front() == '+') ++begin;
  auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<std::string> first_number(std::string_view s) {
  static const std::regex re(R"([-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?)");
  const std::string clean = strip_digit_commas(s);
  std::smatch m;
  if (!std::regex_search(clean, m, re)) return std::nullopt;
  auto v = parse_number(m.str());
  if (!v) return std::nullopt;
  return text::format_double(*v);
}

std::optional<std::string> mcqa_letter(std::string_view s, std::size_t n_choices) {
  const auto last = static_cast<char>('A' + std::min<std::size_t>(n_choices, 26) - 1);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c < 'A' || c > last) continue;
    const bool left_ok = i == 0 || !std::isalnum(static_cast<unsigned char>(s[i - 1]));
    const bool right_ok = i + 1 == s.size() || !std::isalnum(static_cast<unsigned char>(s[i + 1]));
    if (left_ok && right_ok) return std::string(1, c);
  }
  return std::nullopt;
}

std::optional<std::string> yes_no(std::string_view s) {
  for (const auto& w : text::words(s)) {
    if (w == "yes" || w == "no") return w;
  }
  return std::nullopt;
}

}  // namespace

std::string normalize_strict(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::ispunct(c)) continue;
    if (std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::optional<std::string> extract_answer(std::string_view response, const DatasetRecord& record) {
  switch (record.format) {
    case AnswerFormat::Mcqa: {
      const auto p = after_answer_marker(text::to_lower(response));
      if (p != std::string::npos) {
        if (auto v = mcqa_letter(std::string_view(response).substr(p), record.choices.size())) return v;
      }
      return mcqa_letter(response, record.choices.size());
    }
    case AnswerFormat::YesNo:
      return yes_no(response);
    case AnswerFormat::Numeric: {
      const auto lower = text::to_lower(response);
      const auto p = after_answer_marker(lower);
      if (p != std::string::npos) {
        if (auto v = first_number(std::string_view(response).substr(p))) return v;
      }
      return first_number(response);
    }
    case AnswerFormat::Open: {
      const auto lower = text::to_lower(response);
      const auto p = after_answer_marker(lower);
      std::string_view tail = response;
      if (p != std::string::npos) {
        tail = tail.substr(p);
        tail = tail.substr(0, tail.find('\n'));
      }
      auto n = normalize_strict(tail);
      if (n.empty()) return std::nullopt;
      return n;
    }
  }
  return std::nullopt;
}

std::optional<std::string> normalize_reference(std::string_view answer, const DatasetRecord& record) {
  switch (record.format) {
    case AnswerFormat::Mcqa: {
      const auto t = text::trim(answer);
      if (t.size() == 1) {
        const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(t[0])));
        if (c >= 'A' && static_cast<std::size_t>(c - 'A') < record.choices.size()) return std::string(1, c);
        return std::nullopt;
      }
      const auto n = normalize_strict(t);
      for (std::size_t i = 0; i < record.choices.size(); ++i) {
        if (!n.empty() && normalize_strict(record.choices[i]) == n) return std::string(1, static_cast<char>('A' + i));
      }
      return std::nullopt;
    }
    case AnswerFormat::YesNo: {
      const auto n = normalize_strict(answer);
      if (n == "yes" || n == "no") return n;
      return std::nullopt;
    }
    case AnswerFormat::Numeric: {
      auto v = parse_number(strip_digit_commas(text::trim(answer)));
      if (!v) return std::nullopt;
      return text::format_double(*v);
    }
    case AnswerFormat::Open: {
      auto n = normalize_strict(answer);
      if (n.empty()) return std::nullopt;
      return n;
    }
  }
  return std::nullopt;
}

bool answers_match(std::string_view extracted, std::string_view reference, AnswerFormat format) {
  if (format != AnswerFormat::Numeric) return extracted == reference;
  const auto a = parse_number(extracted);
  const auto b = parse_number(reference);
  if (!a || !b) return false;
  if (*a == *b) return true;
  return std::abs(*a - *b) <= kNumericRelTol * std::abs(*b);
}

Verdict AnswerJudge::judge(std::string_view response, const DatasetRecord& record) const {
  Verdict v;
  v.extracted = extract_answer(response, record);
  if (!v.extracted || !record.answer) return v;
  const auto ref = normalize_reference(*record.answer, record);
  v.correct = ref && answers_match(*v.extracted, *ref, record.format);
  return v;
}

}  // namespace pstar
