#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace pstar {

enum class AnswerFormat { Mcqa, YesNo, Numeric, Open };

std::string_view to_string(AnswerFormat f);
AnswerFormat parse_answer_format(std::string_view s);

// One ingested question. Dataset files are JSON lines:
//   {"id": "q1", "question": "...", "image": "img/q1.png", "choices": ["..", ".."],
//    "answer": "B", "format": "mcqa", "figure_id": "f1", "question_group_id": "g1"}
// Only id, question and format are required; answer is required where the
// operation is supervised (search, evaluation).
struct DatasetRecord {
  std::string id;
  std::string question;
  std::optional<std::string> image;
  std::vector<std::string> choices;
  std::optional<std::string> answer;
  AnswerFormat format = AnswerFormat::Open;
  std::optional<std::string> figure_id;
  std::optional<std::string> question_group_id;
};

// Throws InvalidRecord when the record violates its format's invariants.
void validate(const DatasetRecord& record);

nlohmann::json to_json(const DatasetRecord& record);
DatasetRecord record_from_json(const nlohmann::json& j);

struct Dataset {
  std::vector<DatasetRecord> records;
  std::filesystem::path root;  // directory image paths are resolved against
};

Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const std::vector<DatasetRecord>& records, const std::filesystem::path& path);

std::filesystem::path resolve_image(const std::string& image, const std::filesystem::path& root);

// Reads a JSON-lines file, skipping blank lines. Throws IoError / MalformedData
// with the offending line number.
std::vector<nlohmann::json> read_json_lines(const std::filesystem::path& path);
void write_json_lines(const std::vector<nlohmann::json>& rows, const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace pstar
