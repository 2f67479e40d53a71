#pragma once

#include <stdexcept>
#include <string>

namespace tripboost {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data is unusable: unreadable file, missing column, insufficient span.
class DataError : public Error {
 public:
  using Error::Error;
};

/// A configuration value or option is invalid.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A persisted model document failed validation (version, checksum, schema).
class FormatError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace tripboost
