#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace sps {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class StalledLinesearch : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed LIBSVM input; line numbers are 1-based.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// Raised when an iterate leaves the finite/bounded region. `last_finite_iteration`
// is the last k whose iterate was still acceptable (0 if none).
class DivergenceError : public Error {
 public:
  DivergenceError(std::int64_t last_finite_iteration, const std::string& what)
      : Error(what), last_finite_iteration_(last_finite_iteration) {}

  std::int64_t last_finite_iteration() const noexcept { return last_finite_iteration_; }

 private:
  std::int64_t last_finite_iteration_;
};

}  // namespace sps
