#pragma once

#include <stdexcept>
#include <string>

namespace hetverify {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A free parameter or flag is outside its documented range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A data invariant is violated (non-normalized state, non-unitary matrix, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A Fock index exceeded the combinatorics guard.
class BoundsError : public Error {
 public:
  using Error::Error;
};

// A truncated representation lost too much norm; carries the measured deficit.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, double deficit)
      : Error(what), deficit_(deficit) {}
  double deficit() const { return deficit_; }

 private:
  double deficit_ = 0.0;
};

// Overflow, NaN or other numeric failure in an evaluation.
class NumericError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetverify
