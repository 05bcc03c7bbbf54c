#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace seqsearch {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A method was called in the wrong order or with arguments that violate
/// its preconditions (e.g. predict_next() before initialize()).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// set_state() received a snapshot produced by a different predictor type.
class StateMismatchError : public Error {
 public:
  using Error::Error;
};

/// The current hypothesis cannot be continued by any token.
class DeadHypothesisError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (weights, Poisson rate, sigma, names...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A tokenization transducer produced more than one expansion.
class AmbiguityError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input whose content is inconsistent (count mismatches,
/// dangling state ids, non-positive epsilon cycles).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed text input. Carries the 1-based line number (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace seqsearch
