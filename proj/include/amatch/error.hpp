#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace amatch {

enum class ErrorKind {
  kEmptySide,
  kShapeMismatch,
  kNonFiniteValue,
  kDegenerateWidth,
  kNotScalar,
  kTooFewTargets,
  kNoCandidates,
  kIndexOutOfBounds,
  kLengthMismatch,
  kInvalidWarp,
  kEmptyGroundTruth,
  kNonFiniteLoss,
  kFileFormat,
  kConfig,
  kInvalidArgument,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what) {}

  ErrorKind kind() const noexcept { return kind_; }
  // Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

// Throws Error(kind, message) unless cond holds.
inline void require(bool cond, ErrorKind kind, const std::string& message) {
  if (!cond) throw Error(kind, message);
}

}  // namespace amatch
