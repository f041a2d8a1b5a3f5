#include "pstar/text.hpp"

#include <array>
#include <charconv>
#include <cctype>

namespace pstar::text {
namespace {

bool is_word_byte(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

bool is_vowel(char c) {
  switch (c) {
    case 'a': case 'e': case 'i': case 'o': case 'u': case 'y':
      return true;
    default:
      return false;
  }
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::vector<std::string> words(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_word_byte(c)) {
      current.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::size_t sentence_count(std::string_view text) {
  std::size_t count = 0;
  bool segment_has_word = false;
  for (char ch : text) {
    if (is_terminator(ch)) {
      if (segment_has_word) ++count;
      segment_has_word = false;
    } else if (is_word_byte(static_cast<unsigned char>(ch))) {
      segment_has_word = true;
    }
  }
  if (segment_has_word) ++count;
  return count;
}

int syllables(std::string_view word) {
  int groups = 0;
  bool in_group = false;
  for (char c : word) {
    const bool v = is_vowel(c);
    if (v && !in_group) ++groups;
    in_group = v;
  }
  // Silent trailing 'e': a lone final 'e' after a consonant, when it is not
  // the only vowel group ("cake" -> 1, "the" -> 1, "see" -> 1).
  const auto n = word.size();
  if (groups > 1 && n >= 2 && word[n - 1] == 'e' && !is_vowel(word[n - 2])) --groups;
  return groups < 1 ? 1 : groups;
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string format_double(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf.data(), ptr);
}

}  // namespace pstar::text
