#pragma once

#include <stdexcept>
#include <string>

namespace lacogsea {

/// Category of a failure, carried through to the CLI's error JSON.
enum class ErrorKind {
  InvalidArgument,
  Format,
  DuplicateId,
  Shape,
  Numeric,
  UniverseMismatch,
  NotFound,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace lacogsea
