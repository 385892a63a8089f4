#include "vprgt/error.hpp"

namespace vprgt {

Error::Error(std::string code, const std::string& message, std::string detail)
    : std::runtime_error(message), code_(std::move(code)), detail_(std::move(detail)) {}

void rethrow_with_prefix(const Error& e, const std::string& prefix) {
  const std::string message = prefix + e.what();
  const std::string& c = e.code();
  if (c == "parse_error") throw ParseError(message, e.detail());
  if (c == "validation_error") throw ValidationError(message, e.detail());
  if (c == "degenerate") throw DegenerateError(message, e.detail());
  if (c == "not_found") throw NotFoundError(message, e.detail());
  if (c == "version_conflict") throw VersionConflictError(message, e.detail());
  if (c == "state_error") throw StateError(message, e.detail());
  if (c == "generation_error") throw GenerationError(message, e.detail());
  if (c == "io_error") throw IoError(message, e.detail());
  throw Error(c, message, e.detail());
}

}  // namespace vprgt
