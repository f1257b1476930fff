#pragma once

#include <stdexcept>
#include <string>

namespace egoe {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arguments outside the mathematical domain of an operation (bad N, m, k, q, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A basis or matrix would exceed the configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Non-finite input or a numerical procedure that failed to converge.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Spectrum with zero width; moments and standardization are undefined.
class DegenerateSpectrumError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// Least-squares design matrix without full column rank.
class SingularFitError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// The smooth distribution function is not strictly increasing over the data.
class UnfoldingError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// File or stream failure; the message carries the path.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace egoe
