#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace evobench {

// Input vector length does not fit the objective's dimension rule.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Function or generator constants outside their valid domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid run / pool / operator configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OperatorError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed landscape, catalog or CSV input. Carries the 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Well-formed input whose contents violate a data invariant (e.g. zeta <= 0).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InitializationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A non-finite value or gradient showed up during local optimization.
class NonFiniteError : public std::runtime_error {
 public:
  NonFiniteError(const std::string& what, std::vector<double> iterate)
      : std::runtime_error(what), iterate_(std::move(iterate)) {}
  const std::vector<double>& iterate() const noexcept { return iterate_; }

 private:
  std::vector<double> iterate_;
};

}  // namespace evobench
