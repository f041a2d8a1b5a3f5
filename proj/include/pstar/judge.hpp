#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pstar/dataset.hpp"

namespace pstar {

// Lowercase, drop ASCII punctuation, collapse whitespace runs, trim.
std::string normalize_strict(std::string_view s);

// Canonical answer pulled out of a model response, by format:
//   mcqa    first standalone uppercase letter within the record's choice range,
//           looked for after the last answer marker first
//   yesno   first "yes"/"no" word
//   numeric first number after an "answer is"/"answer:" marker, else the first
//           number in the text (thousands separators ignored)
//   open    the rest of the line after the last answer marker, else the whole
//           text, strictly normalized
std::optional<std::string> extract_answer(std::string_view response, const DatasetRecord& record);

// Canonical form of the record's answer key under the same rules; nullopt when
// the key is inconsistent with the format. A mcqa key may be a letter or the
// exact text of one of the choices.
std::optional<std::string> normalize_reference(std::string_view answer, const DatasetRecord& record);

// Equality of canonical answers; numeric uses relative tolerance 1e-4.
bool answers_match(std::string_view extracted, std::string_view reference, AnswerFormat format);

struct Verdict {
  std::optional<std::string> extracted;
  bool correct = false;
};

// The single judging path shared by search goal tests and evaluation.
class AnswerJudge {
 public:
  virtual ~AnswerJudge() = default;
  virtual Verdict judge(std::string_view response, const DatasetRecord& record) const;
};

}  // namespace pstar
