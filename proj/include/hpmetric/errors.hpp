#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hpm {

// Process exit codes shared by the library error types and the CLI.
enum class ExitCode : int {
  success = 0,
  verification_failure = 1,
  input_error = 2,
  numerical_failure = 3,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

// Bad input: unparsable files, out-of-domain parameters, reducible chains.
class InputError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::input_error; }
};

class ParseError : public InputError {
 public:
  ParseError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class IrreducibilityError : public InputError {
 public:
  using InputError::InputError;
};

class UsageError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public InputError {
 public:
  using InputError::InputError;
};

// Computation failed even though the input was well formed.
class NumericalError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::numerical_failure; }
};

// The degenerate-class structure did not close up (usually a tolerance artifact).
class StructureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Two quantities that must agree analytically (Q and phi, closure of classes) did not.
class ConsistencyError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SimulationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class GenerationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace hpm
