#pragma once

#include <stdexcept>
#include <string>

namespace gsp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-domain input (bad node index, self-loop, k < 1, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// Two inputs that must describe the same node set disagree.
class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

/// Request exceeds the size guard of an exhaustive routine.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Non-finite value produced while evaluating an objective or solver step.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Closed-form constant evaluated outside the region where it is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace gsp
