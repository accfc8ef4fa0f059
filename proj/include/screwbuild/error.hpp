#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace screwbuild {

enum class ErrorCode {
  kDegenerate,
  kMalformed,
  kNonMonotoneTime,
  kBadQuaternion,
  kDegenerateDemo,
  kNoAnchor,
  kInvalidSpec,
  kLengthMismatch,
  kSewSingular,
  kBadEps,
  kIoFailure,
};

std::string_view to_string(ErrorCode code);

// Every recoverable failure in the library is reported through this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerate: return "DEGENERATE";
    case ErrorCode::kMalformed: return "MALFORMED";
    case ErrorCode::kNonMonotoneTime: return "NON_MONOTONE_TIME";
    case ErrorCode::kBadQuaternion: return "BAD_QUATERNION";
    case ErrorCode::kDegenerateDemo: return "DEGENERATE_DEMO";
    case ErrorCode::kNoAnchor: return "NO_ANCHOR";
    case ErrorCode::kInvalidSpec: return "INVALID_SPEC";
    case ErrorCode::kLengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::kSewSingular: return "SEW_SINGULAR";
    case ErrorCode::kBadEps: return "BAD_EPS";
    case ErrorCode::kIoFailure: return "IO_FAILURE";
  }
  return "UNKNOWN";
}

}  // namespace screwbuild
