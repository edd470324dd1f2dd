#pragma once

#include <stdexcept>
#include <string>

namespace ma {

// CLI exit codes. Library errors map onto these at the tool boundary.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitIncompatible = 3,
};

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input, invalid parameters, unusable files. Exit code 2.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Version or pipeline-parameter mismatch between artifacts. Exit code 3.
class IncompatibilityError : public Error {
 public:
  using Error::Error;
};

}  // namespace ma
