#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bsrnn {

enum class ErrorCode {
  kInvalidArgument,
  kFormat,
  kShape,
  kNumericDegeneracy,
  kDegenerateScheme,
  kLookup,
  kConfig,
  kDegenerateInput,
  kUndefinedMetric,
  kBadMagic,
  kVersionMismatch,
  kChecksum,
  kMissingTensor,
  kExtraTensor,
  kTensorShape,
  kUnsupportedSampleRate,
  kIo,
};

// Every failure raised by the library carries one of the codes above so the
// CLI can print a single-line diagnostic per class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class FormatError : public Error {
 public:
  FormatError(const std::string& message, std::size_t offset)
      : Error(ErrorCode::kFormat, message + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kFormat: return "format-error";
    case ErrorCode::kShape: return "shape-error";
    case ErrorCode::kNumericDegeneracy: return "numeric-degeneracy";
    case ErrorCode::kDegenerateScheme: return "degenerate-scheme";
    case ErrorCode::kLookup: return "lookup-error";
    case ErrorCode::kConfig: return "configuration-error";
    case ErrorCode::kDegenerateInput: return "degenerate-input";
    case ErrorCode::kUndefinedMetric: return "undefined-metric";
    case ErrorCode::kBadMagic: return "bad-magic";
    case ErrorCode::kVersionMismatch: return "version-mismatch";
    case ErrorCode::kChecksum: return "checksum-error";
    case ErrorCode::kMissingTensor: return "missing-tensor";
    case ErrorCode::kExtraTensor: return "extra-tensor";
    case ErrorCode::kTensorShape: return "tensor-shape-mismatch";
    case ErrorCode::kUnsupportedSampleRate: return "unsupported-sample-rate";
    case ErrorCode::kIo: return "io-error";
  }
  return "unknown";
}

}  // namespace bsrnn
