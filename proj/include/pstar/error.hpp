#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pstar {

enum class ErrorKind {
  // usage / parse
  Usage,
  ParseError,
  // data
  EmptyText,
  ImageTooSmall,
  EmptyImage,
  ImageDecode,
  TooFewSamples,
  MissingStats,
  EmptyInput,
  DimensionMismatch,
  EmptyLibrary,
  IoError,
  SchemaVersionMismatch,
  MalformedData,
  InvalidRecord,
  InvalidHistory,
  ExtractionFailed,
  EmptyDataset,
  EmptyResults,
  MissingGroupKey,
  FormatMismatch,
  InvariantViolation,
  // backend
  BackendUnavailable,
  MalformedResponse,
};

enum class ErrorCategory { Usage = 1, Data = 2, Backend = 3 };

std::string_view to_string(ErrorKind kind);
ErrorCategory category_of(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

 private:
  ErrorKind kind_;
};

// Process exit code for an error category: 1 usage, 2 data, 3 backend.
inline int exit_code(ErrorCategory c) { return static_cast<int>(c); }

}  // namespace pstar
