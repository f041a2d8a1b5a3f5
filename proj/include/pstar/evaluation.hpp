#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "pstar/dataset.hpp"

namespace pstar {

struct JudgedResult {
  std::string question_id;
  std::optional<std::string> predicted;
  std::string reference;
  bool correct = false;
  AnswerFormat format = AnswerFormat::Open;
  std::optional<std::string> figure_id;
  std::optional<std::string> question_group_id;
};

// Judges an extracted prediction against the record's key with the shared
// normalization rules.
JudgedResult judge_prediction(const DatasetRecord& record, const std::optional<std::string>& predicted);

double accuracy(std::span<const JudgedResult> results);

struct BinaryMetrics {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
  double accuracy = 0.0;
  std::optional<double> precision;  // absent without positive predictions
  std::optional<double> recall;     // absent without positive references
};

// Yes/no metrics with "yes" as the positive class. A missing prediction counts
// as a negative one. Throws FormatMismatch on non-yesno results.
BinaryMetrics yes_no_metrics(std::span<const JudgedResult> results);

enum class GroupKey { Figure, Question };

// A group counts as correct only when every member is correct.
double grouped_accuracy(std::span<const JudgedResult> results, GroupKey key);

// Case-insensitive, whitespace-normalized, punctuation-stripped equality.
bool strict_match(std::string_view predicted, std::string_view reference);

struct MetricReport {
  std::size_t total = 0;
  std::size_t correct = 0;
  double aacc = 0.0;
  std::optional<double> facc;
  std::optional<double> qacc;
  std::optional<BinaryMetrics> yes_no;
  std::map<std::string, std::pair<std::size_t, std::size_t>> by_format;  // correct, total
};

// Reports grouped accuracies only when every result carries that key, and
// yes/no metrics only for all-yesno result sets.
MetricReport summarize(std::span<const JudgedResult> results);
nlohmann::json to_json(const MetricReport& report);
std::string format_table(const MetricReport& report);

nlohmann::json to_json(const JudgedResult& r);

}  // namespace pstar
