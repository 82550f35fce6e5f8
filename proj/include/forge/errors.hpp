#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace forge {

// Base for all library errors. `kind()` is the stable machine-readable name
// used by the CLI for exit-code mapping and --json-errors output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

// Malformed input bytes. `offset` is a byte offset into the document when
// known, or npos.
class ParseError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  explicit ParseError(const std::string& message, std::size_t offset = npos)
      : Error("ParseError", message), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Well-formed input that violates a documented precondition or invariant.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& message)
      : Error("ValidationError", message) {}
};

// A value that cannot be converted between representations (numerals, labels).
class ConversionError : public Error {
 public:
  explicit ConversionError(const std::string& message)
      : Error("ConversionError", message) {}
};

// Non-finite values or divergence inside numeric routines.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& message)
      : Error("NumericalError", message) {}
};

// A perturbation op found nothing applicable. Compose treats this as a
// signal to drop the record, not as a hard failure.
class NoOpError : public Error {
 public:
  explicit NoOpError(const std::string& message)
      : Error("NoOpError", message) {}
};

// Whole-word masking found no eligible words (or too few positions to reach
// the target rate). Callers may substitute plain token masking.
class FallbackToTokenMasking : public Error {
 public:
  explicit FallbackToTokenMasking(const std::string& message)
      : Error("FallbackToTokenMasking", message) {}
};

}  // namespace forge
