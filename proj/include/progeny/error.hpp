#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace progeny {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An argument lies outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// A rate function produced a non-finite or negative value.
class EvaluationError : public Error {
 public:
  EvaluationError(const std::string& what, double x) : Error(what), x_(x) {}
  double x() const noexcept { return x_; }

 private:
  double x_;
};

// Syntax errors in rate expressions. `offset` is a byte offset into the input.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset, std::vector<std::string> expected = {})
      : Error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

// Numerical failure: non-convergence, missing bracket, step-size underflow.
class NumericError : public Error {
 public:
  enum class Kind { tolerance, no_bracket, divergence, stiffness, subcritical, max_iterations };

  NumericError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

// Experiment configuration could not be loaded or is inconsistent.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace progeny
