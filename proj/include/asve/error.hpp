#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace asve {

/// Precondition violated by caller-supplied data or parameters.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input is well-formed but carries no usable information (e.g. a zero weight function).
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every pre-averaged value was rejected; nothing left to estimate from.
class EstimationImpossible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TooFewObservations : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace asve
