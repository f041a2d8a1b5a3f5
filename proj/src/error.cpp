#include "pstar/error.hpp"

namespace pstar {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage: return "Usage";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::EmptyText: return "EmptyText";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::EmptyImage: return "EmptyImage";
    case ErrorKind::ImageDecode: return "ImageDecode";
    case ErrorKind::TooFewSamples: return "TooFewSamples";
    case ErrorKind::MissingStats: return "MissingStats";
    case ErrorKind::EmptyInput: return "EmptyInput";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptyLibrary: return "EmptyLibrary";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::SchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorKind::MalformedData: return "MalformedData";
    case ErrorKind::InvalidRecord: return "InvalidRecord";
    case ErrorKind::InvalidHistory: return "InvalidHistory";
    case ErrorKind::ExtractionFailed: return "ExtractionFailed";
    case ErrorKind::EmptyDataset: return "EmptyDataset";
    case ErrorKind::EmptyResults: return "EmptyResults";
    case ErrorKind::MissingGroupKey: return "MissingGroupKey";
    case ErrorKind::FormatMismatch: return "FormatMismatch";
    case ErrorKind::InvariantViolation: return "InvariantViolation";
    case ErrorKind::BackendUnavailable: return "BackendUnavailable";
    case ErrorKind::MalformedResponse: return "MalformedResponse";
  }
  return "Unknown";
}

ErrorCategory category_of(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::ParseError:
      return ErrorCategory::Usage;
    case ErrorKind::BackendUnavailable:
    case ErrorKind::MalformedResponse:
      return ErrorCategory::Backend;
    default:
      return ErrorCategory::Data;
  }
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace pstar
