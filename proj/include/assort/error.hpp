#pragma once

#include <stdexcept>
#include <string>

namespace assort {

// Base class for every error raised by the library. The CLI maps the
// concrete subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input data: corpus files, artifacts, configs.
class DataError : public Error {
 public:
  using Error::Error;
};

// A model provider (stub, file, remote) could not satisfy a request.
class ProviderError : public Error {
 public:
  using Error::Error;
};

// Caller violated a precondition (bad argument, bad flag combination).
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace assort
