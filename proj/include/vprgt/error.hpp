#pragma once

#include <stdexcept>
#include <string>

namespace vprgt {

/// Base of every error raised by the toolkit. `code()` is a stable
/// machine-readable tag; the HTTP layer maps it onto a status code.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message, std::string detail = {});

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& message, std::string detail = {})
      : Error("parse_error", message, std::move(detail)) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message, std::string detail = {})
      : Error("validation_error", message, std::move(detail)) {}
};

/// Geometric configuration too poor for the requested fit or curve.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& message, std::string detail = {})
      : Error("degenerate", message, std::move(detail)) {}
};

class NotFoundError : public Error {
 public:
  explicit NotFoundError(const std::string& message, std::string detail = {})
      : Error("not_found", message, std::move(detail)) {}
};

class VersionConflictError : public Error {
 public:
  explicit VersionConflictError(const std::string& message, std::string detail = {})
      : Error("version_conflict", message, std::move(detail)) {}
};

/// Operation not allowed in the current lifecycle state.
class StateError : public Error {
 public:
  explicit StateError(const std::string& message, std::string detail = {})
      : Error("state_error", message, std::move(detail)) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& message, std::string detail = {})
      : Error("generation_error", message, std::move(detail)) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message, std::string detail = {})
      : Error("io_error", message, std::move(detail)) {}
};

/// Throws an error of the same class as `e` with `prefix` prepended to its
/// message.
[[noreturn]] void rethrow_with_prefix(const Error& e, const std::string& prefix);

}  // namespace vprgt
