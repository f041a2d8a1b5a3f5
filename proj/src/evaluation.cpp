#include "pstar/evaluation.hpp"

#include <iomanip>
#include <sstream>

#include "pstar/error.hpp"
#include "pstar/judge.hpp"
#include "pstar/text.hpp"

namespace pstar {

JudgedResult judge_prediction(const DatasetRecord& record, const std::optional<std::string>& predicted) {
  if (!record.answer) throw Error(ErrorKind::InvalidRecord, record.id + ": no answer key");
  JudgedResult r;
  r.question_id = record.id;
  r.predicted = predicted;
  const auto ref = normalize_reference(*record.answer, record);
  r.reference = ref.value_or(*record.answer);
  r.correct = predicted && ref && answers_match(*predicted, *ref, record.format);
  r.format = record.format;
  r.figure_id = record.figure_id;
  r.question_group_id = record.question_group_id;
  return r;
}

double accuracy(std::span<const JudgedResult> results) {
  if (results.empty()) throw Error(ErrorKind::EmptyResults, "no results");
  std::size_t c = 0;
  for (const auto& r : results) c += r.correct ? 1 : 0;
  return static_cast<double>(c) / static_cast<double>(results.size());
}

BinaryMetrics yes_no_metrics(std::span<const JudgedResult> results) {
  if (results.empty()) throw Error(ErrorKind::EmptyResults, "no results");
  BinaryMetrics m;
  for (const auto& r : results) {
    if (r.format != AnswerFormat::YesNo) throw Error(ErrorKind::FormatMismatch, r.question_id + " is not yes/no");
    const bool pred_yes = r.predicted && *r.predicted == "yes";
    const bool ref_yes = r.reference == "yes";
    if (pred_yes && ref_yes) ++m.tp;
    else if (pred_yes) ++m.fp;
    else if (ref_yes) ++m.fn;
    else ++m.tn;
  }
  const auto n = static_cast<double>(results.size());
  m.accuracy = static_cast<double>(m.tp + m.tn) / n;
  if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  return m;
}

double grouped_accuracy(std::span<const JudgedResult> results, GroupKey key) {
  if (results.empty()) throw Error(ErrorKind::EmptyResults, "no results");
  std::map<std::string, bool> groups;
  for (const auto& r : results) {
    const auto& k = key == GroupKey::Figure ? r.figure_id : r.question_group_id;
    if (!k) {
      throw Error(ErrorKind::MissingGroupKey,
                  r.question_id + " lacks " + (key == GroupKey::Figure ? "figure_id" : "question_group_id"));
    }
    auto [it, inserted] = groups.try_emplace(*k, true);
    it->second = it->second && r.correct;
  }
  std::size_t ok = 0;
  for (const auto& [k, all_correct] : groups) ok += all_correct ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(groups.size());
}

bool strict_match(std::string_view predicted, std::string_view reference) {
  return normalize_strict(predicted) == normalize_strict(reference);
}

MetricReport summarize(std::span<const JudgedResult> results) {
  MetricReport rep;
  rep.total = results.size();
  rep.aacc = accuracy(results);
  bool all_fig = true, all_group = true, all_yesno = true;
  for (const auto& r : results) {
    rep.correct += r.correct ? 1 : 0;
    auto& [c, t] = rep.by_format[std::string(to_string(r.format))];
    c += r.correct ? 1 : 0;
    ++t;
    all_fig = all_fig && r.figure_id.has_value();
    all_group = all_group && r.question_group_id.has_value();
    all_yesno = all_yesno && r.format == AnswerFormat::YesNo;
  }
  if (all_fig) rep.facc = grouped_accuracy(results, GroupKey::Figure);
  if (all_group) rep.qacc = grouped_accuracy(results, GroupKey::Question);
  if (all_yesno) rep.yes_no = yes_no_metrics(results);
  return rep;
}

namespace {

nlohmann::json opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json to_json(const MetricReport& rep) {
  nlohmann::json j = {{"total", rep.total}, {"correct", rep.correct}, {"aAcc", rep.aacc},
                      {"fAcc", opt(rep.facc)}, {"qAcc", opt(rep.qacc)}};
  nlohmann::json formats = nlohmann::json::object();
  for (const auto& [f, ct] : rep.by_format) {
    formats[f] = {{"correct", ct.first}, {"total", ct.second},
                  {"accuracy", static_cast<double>(ct.first) / static_cast<double>(ct.second)}};
  }
  j["by_format"] = formats;
  if (rep.yes_no) {
    const auto& m = *rep.yes_no;
    j["yes_no"] = {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}, {"accuracy", m.accuracy},
                   {"precision", opt(m.precision)}, {"recall", opt(m.recall)}};
  } else {
    j["yes_no"] = nullptr;
  }
  return j;
}

std::string format_table(const MetricReport& rep) {
  std::ostringstream out;
  const auto row = [&out](const std::string& name, const std::string& value) {
    out << std::left << std::setw(14) << name << std::right << std::setw(10) << value << '\n';
  };
  const auto pct = [](std::optional<double> v) {
    if (!v) return std::string("-");
    std::ostringstream s;
    s << std::fixed << std::setprecision(2) << *v * 100.0;
    return s.str();
  };
  row("metric", "value");
  row("total", std::to_string(rep.total));
  row("correct", std::to_string(rep.correct));
  row("aAcc", pct(rep.aacc));
  row("fAcc", pct(rep.facc));
  row("qAcc", pct(rep.qacc));
  if (rep.yes_no) {
    row("accuracy", pct(rep.yes_no->accuracy));
    row("precision", pct(rep.yes_no->precision));
    row("recall", pct(rep.yes_no->recall));
  }
  for (const auto& [f, ct] : rep.by_format) {
    row("acc[" + f + "]", pct(static_cast<double>(ct.first) / static_cast<double>(ct.second)));
  }
  return out.str();
}

nlohmann::json to_json(const JudgedResult& r) {
  nlohmann::json j = {{"question_id", r.question_id},
                      {"predicted", r.predicted ? nlohmann::json(*r.predicted) : nlohmann::json(nullptr)},
                      {"reference", r.reference},
                      {"correct", r.correct},
                      {"format", to_string(r.format)}};
  if (r.figure_id) j["figure_id"] = *r.figure_id;
  if (r.question_group_id) j["question_group_id"] = *r.question_group_id;
  return j;
}

}  // namespace pstar
