#pragma once

#include <stdexcept>
#include <string>

namespace quanprism {

// Base class for everything the library throws on bad input or numerical
// trouble. The CLI maps the concrete types onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand shapes do not agree (matrix sizes, state dimensions, ...).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A value violates a type invariant (non-unitary operator, probabilities
// that do not sum to one, parameter out of range, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A computation produced something outside its numerical contract, e.g. a
// significantly negative eigenvalue where a PSD matrix was expected.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Requested object would exceed the dense size budget.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// Text input could not be parsed. `line()` is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace quanprism
