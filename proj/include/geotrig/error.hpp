#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace geotrig {

/// Root of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad expression text, bad config, violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Expression syntax error; `position` is a 0-based offset into the source.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, std::size_t position)
      : InputError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// Numerical failure: out-of-domain evaluation, non-convergence, degenerate geometry.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A chart point fell outside the surface's chart domain.
class OutOfDomain : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Expression evaluated outside its real domain (log of non-positive, etc).
class DomainError : public NumericalError {
 public:
  DomainError(const std::string& what, std::size_t position)
      : NumericalError(what + " at position " + std::to_string(position)), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace geotrig
