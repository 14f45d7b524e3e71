#include "egotrack/error.hpp"

namespace egotrack {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidDepth: return "invalid-depth";
    case ErrorCode::kOutOfBounds: return "out-of-bounds";
    case ErrorCode::kBehindCamera: return "behind-camera";
    case ErrorCode::kDegenerateRay: return "degenerate-ray";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kDegenerateTemplate: return "degenerate-template";
    case ErrorCode::kSingularInnovation: return "singular-innovation";
    case ErrorCode::kDuplicateId: return "duplicate-id";
    case ErrorCode::kFrameMismatch: return "frame-mismatch";
    case ErrorCode::kSizeLimit: return "size-limit";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace egotrack
