#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace loel {

// Base of every error raised by the library. CLI maps these to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (dimension mismatch, bad sizes).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Cholesky failed even after the maximum diagonal jitter.
class NotPositiveDefinite : public Error {
 public:
  NotPositiveDefinite(const std::string& what, double attempted_jitter)
      : Error(what), attempted_jitter_(attempted_jitter) {}
  double attempted_jitter() const noexcept { return attempted_jitter_; }

 private:
  double attempted_jitter_;
};

// A result violated an internal invariant (e.g. strongly negative variance).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class OptimizationFailed : public Error {
 public:
  using Error::Error;
};

class DegenerateSignal : public Error {
 public:
  using Error::Error;
};

class IncompleteEvent : public Error {
 public:
  using Error::Error;
};

class InvalidLocation : public Error {
 public:
  using Error::Error;
};

class TriangulationError : public Error {
 public:
  using Error::Error;
};

class LocalisationError : public Error {
 public:
  using Error::Error;
};

// Malformed input file or configuration. `line` is 1-based, 0 when unknown.
class DataError : public Error {
 public:
  DataError(const std::string& source, std::size_t line, const std::string& message);
  const std::string& source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string source_;
  std::size_t line_;
};

}  // namespace loel
