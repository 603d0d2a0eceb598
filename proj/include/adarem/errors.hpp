#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adarem {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Invalid or inconsistent configuration (unknown kind, empty group, bad key).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Non-finite value or numerical collapse during a run.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, std::size_t step)
      : Error(what + " (step " + std::to_string(step) + ")"), step_(step) {}
  explicit NumericError(const std::string& what) : Error(what) {}

  std::size_t step() const { return step_; }

 private:
  std::size_t step_ = 0;
};

// A verifier was asked to check a regime it does not cover.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// The problem offers no way to compute what was asked (e.g. a comparator).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

}  // namespace adarem
