#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace locm {

enum class ErrorCode {
  InvalidArgument,
  MissingFOL,
  SchemaError,
  IoError,
  EmptyIntervals,
  EmptyRecords,
  DegenerateRange,
  DegenerateSeries,
  LengthMismatch,
  EmptyPool,
  TransportError,
  ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MissingFOL: return "MissingFOL";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyIntervals: return "EmptyIntervals";
    case ErrorCode::EmptyRecords: return "EmptyRecords";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::DegenerateSeries: return "DegenerateSeries";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyPool: return "EmptyPool";
    case ErrorCode::TransportError: return "TransportError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

// Every failure the library raises carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace locm
