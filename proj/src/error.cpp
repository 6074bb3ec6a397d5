#include "amatch/error.hpp"

namespace amatch {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kEmptySide: return "EmptySide";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kNonFiniteValue: return "NonFiniteValue";
    case ErrorKind::kDegenerateWidth: return "DegenerateWidth";
    case ErrorKind::kNotScalar: return "NotScalar";
    case ErrorKind::kTooFewTargets: return "TooFewTargets";
    case ErrorKind::kNoCandidates: return "NoCandidates";
    case ErrorKind::kIndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kInvalidWarp: return "InvalidWarp";
    case ErrorKind::kEmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorKind::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorKind::kFileFormat: return "FileFormat";
    case ErrorKind::kConfig: return "Config";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace amatch
