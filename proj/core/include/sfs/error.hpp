#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sfs {

enum class ErrorCode {
  DomainEmpty,
  DegenerateNormal,
  NonFiniteDepth,
  InvalidPriorDepth,
  NotUnitNormal,
  InsufficientData,
  SolverDiverged,
  ConfigError,
  DegenerateLinearization,
  FormatError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DomainEmpty: return "DomainEmpty";
    case ErrorCode::DegenerateNormal: return "DegenerateNormal";
    case ErrorCode::NonFiniteDepth: return "NonFiniteDepth";
    case ErrorCode::InvalidPriorDepth: return "InvalidPriorDepth";
    case ErrorCode::NotUnitNormal: return "NotUnitNormal";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::SolverDiverged: return "SolverDiverged";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::DegenerateLinearization: return "DegenerateLinearization";
    case ErrorCode::FormatError: return "FormatError";
  }
  return "Unknown";
}

/// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace sfs
