#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace priorshift {

// Base class for everything thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid arguments, malformed files, impossible requests.
class InputError : public Error {
 public:
  using Error::Error;
};

// Text-format failure; carries the 1-based line number when known.
class ParseError : public InputError {
 public:
  ParseError(const std::string& msg, std::size_t line)
      : InputError(msg + " (line " + std::to_string(line) + ")"), line_(line) {}
  explicit ParseError(const std::string& msg) : InputError(msg), line_(0) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A computed quantity violated a tolerance that should hold by construction.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// ||mean map(unlabeled) - mean map(positives)|| is numerically zero; the
// closed-form estimator divides by it and refuses instead of amplifying noise.
class DegenerateEmbeddingError : public Error {
 public:
  DegenerateEmbeddingError()
      : Error("positive and unlabeled mean maps indistinguishable; "
              "target prior estimator undefined") {}
  using Error::Error;
};

// delta outside (0, delta_max]; the deviation bounds are only valid below
// delta_max = exp(-(sqrt(2)+1)^2 / 2).
class InvalidDeltaError : public InputError {
 public:
  using InputError::InputError;
};

// The population bound's sample-size condition failed; carries the smallest
// N that would satisfy it.
class InsufficientSampleError : public Error {
 public:
  InsufficientSampleError(const std::string& msg, long long minimal_n)
      : Error(msg), minimal_n_(minimal_n) {}

  long long minimal_n() const noexcept { return minimal_n_; }

 private:
  long long minimal_n_;
};

// The source-prior plug-in estimator failed.
class PluginFailureError : public Error {
 public:
  using Error::Error;
};

}  // namespace priorshift
