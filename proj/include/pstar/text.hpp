#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pstar::text {

// Lowercased words; any run of non-alphanumeric ASCII separates words.
// Bytes >= 0x80 are kept inside words so UTF-8 text is not shredded.
std::vector<std::string> words(std::string_view text);

// Number of '.', '!', '?'-delimited segments that contain at least one word.
// Text with words but no terminator is one sentence.
std::size_t sentence_count(std::string_view text);

// Vowel-group syllable estimate for one lowercased word (minimum 1).
int syllables(std::string_view word);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Shortest decimal representation that round-trips (std::to_chars).
std::string format_double(double value);

}  // namespace pstar::text
