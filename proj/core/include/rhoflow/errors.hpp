#pragma once

#include <stdexcept>
#include <string>

namespace rhoflow {

/// Coarse error taxonomy. The CLI maps each category to a distinct exit code.
enum class ErrorCategory {
  usage,    ///< invalid arguments, out-of-domain parameters
  data,     ///< malformed or degenerate input data
  numeric,  ///< non-finite values, diverged training
  io,       ///< filesystem failures
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCategory::usage, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCategory::data, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what) : Error(ErrorCategory::numeric, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCategory::io, what) {}
};

}  // namespace rhoflow
