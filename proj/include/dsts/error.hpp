#pragma once

#include <stdexcept>
#include <string>

namespace dsts {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A configuration value violates its documented range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Input is well-formed but too small or otherwise degenerate for the operation.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// A non-finite value appeared where only finite values are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// On-disk data (CSV, JSON checkpoint) is missing or malformed.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace dsts
