#include "pstar/dataset.hpp"

#include <fstream>
#include <sstream>

#include "pstar/error.hpp"
#include "pstar/judge.hpp"
#include "pstar/text.hpp"

namespace pstar {

std::string_view to_string(AnswerFormat f) {
  switch (f) {
    case AnswerFormat::Mcqa: return "mcqa";
    case AnswerFormat::YesNo: return "yesno";
    case AnswerFormat::Numeric: return "numeric";
    case AnswerFormat::Open: return "open";
  }
  return "open";
}

AnswerFormat parse_answer_format(std::string_view s) {
  const auto l = text::to_lower(s);
  if (l == "mcqa") return AnswerFormat::Mcqa;
  if (l == "yesno") return AnswerFormat::YesNo;
  if (l == "numeric") return AnswerFormat::Numeric;
  if (l == "open") return AnswerFormat::Open;
  throw Error(ErrorKind::InvalidRecord, "unknown answer format '" + std::string(s) + "'");
}

void validate(const DatasetRecord& r) {
  if (r.id.empty()) throw Error(ErrorKind::InvalidRecord, "record without id");
  if (text::trim(r.question).empty()) throw Error(ErrorKind::InvalidRecord, r.id + ": empty question");
  if (r.format == AnswerFormat::Mcqa && r.choices.size() < 2) {
    throw Error(ErrorKind::InvalidRecord, r.id + ": mcqa needs at least 2 choices");
  }
  if (r.format == AnswerFormat::Mcqa && r.choices.size() > 26) {
    throw Error(ErrorKind::InvalidRecord, r.id + ": mcqa supports at most 26 choices");
  }
  if (!r.answer) return;
  if (!normalize_reference(*r.answer, r)) {
    throw Error(ErrorKind::InvalidRecord,
                r.id + ": answer '" + *r.answer + "' inconsistent with format " + std::string(to_string(r.format)));
  }
}

nlohmann::json to_json(const DatasetRecord& r) {
  nlohmann::json j = {{"id", r.id}, {"question", r.question}, {"format", to_string(r.format)}};
  if (r.image) j["image"] = *r.image;
  if (!r.choices.empty()) j["choices"] = r.choices;
  if (r.answer) j["answer"] = *r.answer;
  if (r.figure_id) j["figure_id"] = *r.figure_id;
  if (r.question_group_id) j["question_group_id"] = *r.question_group_id;
  return j;
}

namespace {

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& v = j.at(key);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return v.dump();
  throw Error(ErrorKind::InvalidRecord, std::string("field '") + key + "' must be a string");
}

}  // namespace

DatasetRecord record_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::InvalidRecord, "record is not a JSON object");
  DatasetRecord r;
  auto id = optional_string(j, "id");
  auto q = optional_string(j, "question");
  if (!id || !q) throw Error(ErrorKind::InvalidRecord, "record needs 'id' and 'question'");
  r.id = *id;
  r.question = *q;
  r.image = optional_string(j, "image");
  if (j.contains("choices") && !j.at("choices").is_null()) {
    if (!j.at("choices").is_array()) throw Error(ErrorKind::InvalidRecord, r.id + ": choices must be an array");
    for (const auto& c : j.at("choices")) r.choices.push_back(c.is_string() ? c.get<std::string>() : c.dump());
  }
  r.answer = optional_string(j, "answer");
  if (auto f = optional_string(j, "format")) {
    r.format = parse_answer_format(*f);
  } else {
    r.format = r.choices.empty() ? AnswerFormat::Open : AnswerFormat::Mcqa;
  }
  r.figure_id = optional_string(j, "figure_id");
  r.question_group_id = optional_string(j, "question_group_id");
  validate(r);
  return r;
}

Dataset load_dataset(const std::filesystem::path& path) {
  Dataset ds;
  ds.root = path.parent_path();
  std::size_t line = 0;
  for (const auto& row : read_json_lines(path)) {
    ++line;
    try {
      ds.records.push_back(record_from_json(row));
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + " record " + std::to_string(line) + ": " + e.what());
    }
  }
  return ds;
}

void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path) {
  std::vector<nlohmann::json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  write_json_lines(rows, path);
}

std::filesystem::path resolve_image(const std::string& image, const std::filesystem::path& root) {
  std::filesystem::path p(image);
  return p.is_absolute() ? p : root / p;
}

std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (text::trim(line).empty()) continue;
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorKind::MalformedData, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return rows;
}

void write_json_lines(const std::vector<nlohmann::json>& rows, const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& r : rows) out << r.dump() << '\n';
  write_file(path, out.str());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

}  // namespace pstar
