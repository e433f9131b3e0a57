#pragma once

#include <stdexcept>
#include <string>

namespace rwle {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidSizeError : Error { using Error::Error; };
struct InfeasibleDegreeError : Error { using Error::Error; };
struct GenerationFailureError : Error { using Error::Error; };
struct InvalidSpecError : Error { using Error::Error; };
struct PreconditionError : Error { using Error::Error; };
struct SizeLimitError : Error { using Error::Error; };
struct NonConvergenceError : Error { using Error::Error; };
struct NumericError : Error { using Error::Error; };
struct MissingLabelError : Error { using Error::Error; };
struct ProtocolViolationError : Error { using Error::Error; };

struct ParseError : Error {
  ParseError(const std::string& what, long line)
      : Error(what + " (line " + std::to_string(line) + ")"), line_number(line) {}
  long line_number;
};

}  // namespace rwle
