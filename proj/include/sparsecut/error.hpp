#pragma once

#include <stdexcept>
#include <string>

namespace sparsecut {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  SupportMismatch,
  UnsupportedFeature,
  MalformedInput,
  SchemaViolation,
  ModeViolation,
  DegenerateGap,
  Numerical,
};

const char* to_string(ErrorKind kind);

/// Base exception for every recoverable failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sparsecut
