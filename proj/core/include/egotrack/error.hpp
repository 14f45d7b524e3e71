#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace egotrack {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidDepth,
  kOutOfBounds,
  kBehindCamera,
  kDegenerateRay,
  kDimensionMismatch,
  kDegenerateTemplate,
  kSingularInnovation,
  kDuplicateId,
  kFrameMismatch,
  kSizeLimit,
  kParse,
  kValidation,
  kFormat,
  kIo,
};

std::string_view to_string(ErrorCode code);

/// Every failure the library reports is an Error carrying a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }
  /// The message without the code prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace egotrack
