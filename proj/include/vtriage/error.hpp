#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace vtriage {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data: malformed files, schema violations, referential
/// integrity failures, bad arguments. Maps to exit status 1 in the CLI.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& what, std::size_t byte_offset);
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A required input file is missing or unreadable.
class IoError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Numerical failure during fitting: divergence, non-convergence, singular
/// information matrix.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace vtriage
