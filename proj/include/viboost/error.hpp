#pragma once

#include <stdexcept>
#include <string>

namespace viboost {

/// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Numerical procedure failed (non-convergence, bracket failure, degenerate weight).
class NumericError : public Error {
 public:
  using Error::Error;
};

class BracketError : public NumericError {
 public:
  using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Malformed input file or configuration.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace viboost
