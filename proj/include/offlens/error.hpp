#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace offlens {

enum class ErrorKind {
  kMalformedLine,
  kScoreOutOfRange,
  kEmptyText,
  kUnknownLabel,
  kDuplicateId,
  kIo,
  kBadBinWidth,
  kEmptyInput,
  kDimensionMismatch,
  kNonFinite,
  kLengthMismatch,
  kEmptyMatrix,
  kMissingModel,
  kEmptyCell,
  kTermTooShort,
  kUnknownId,
  kInvalidArgument,
  kModelFormat,
};

std::string_view to_string(ErrorKind kind);

// All recoverable data errors raised by the library. The CLI maps these to
// exit code 1.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace offlens
