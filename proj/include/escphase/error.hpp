#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace escphase {

enum class ErrorCode {
  InvalidInput,
  ConstantSignal,
  WindowTooShort,
  InsufficientLength,
  OutOfDisk,
  IndexOutOfRange,
  EmptySupport,
  StartNotInSupport,
  DecompositionFailure,
  EmptyAbsorbingSet,
  SingularSystem,
  ConvergenceFailure,
  NoEscape,
  NoSuccessfulRecords,
  Io,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers switch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::ConstantSignal: return "ConstantSignal";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::InsufficientLength: return "InsufficientLength";
    case ErrorCode::OutOfDisk: return "OutOfDisk";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::EmptySupport: return "EmptySupport";
    case ErrorCode::StartNotInSupport: return "StartNotInSupport";
    case ErrorCode::DecompositionFailure: return "DecompositionFailure";
    case ErrorCode::EmptyAbsorbingSet: return "EmptyAbsorbingSet";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::NoEscape: return "NoEscape";
    case ErrorCode::NoSuccessfulRecords: return "NoSuccessfulRecords";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace escphase
