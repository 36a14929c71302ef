#include "offlens/error.hpp"

namespace offlens {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedLine: return "MalformedLine";
    case ErrorKind::kScoreOutOfRange: return "ScoreOutOfRange";
    case ErrorKind::kEmptyText: return "EmptyText";
    case ErrorKind::kUnknownLabel: return "UnknownLabel";
    case ErrorKind::kDuplicateId: return "DuplicateId";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kBadBinWidth: return "BadBinWidth";
    case ErrorKind::kEmptyInput: return "EmptyInput";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kNonFinite: return "NonFinite";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kEmptyMatrix: return "EmptyMatrix";
    case ErrorKind::kMissingModel: return "MissingModel";
    case ErrorKind::kEmptyCell: return "EmptyCell";
    case ErrorKind::kTermTooShort: return "TermTooShort";
    case ErrorKind::kUnknownId: return "UnknownId";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kModelFormat: return "ModelFormat";
  }
  return "Unknown";
}

}  // namespace offlens
