#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace geoaffect {

enum class ErrorKind {
  DegenerateLandmarks,
  ShapeMismatch,
  SingularSystem,
  RankExhausted,
  NonFinite,
  IndexOutOfRange,
  InsufficientSubjects,
  CountExceedsFeatures,
  ConfigInvalid,
  SchemaViolation,
  Usage,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateLandmarks: return "DegenerateLandmarks";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::RankExhausted: return "RankExhausted";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::InsufficientSubjects: return "InsufficientSubjects";
    case ErrorKind::CountExceedsFeatures: return "CountExceedsFeatures";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::SchemaViolation: return "SchemaViolation";
    case ErrorKind::Usage: return "Usage";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace geoaffect
