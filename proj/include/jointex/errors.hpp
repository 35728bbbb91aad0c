#pragma once

#include <stdexcept>
#include <string>

namespace jointex {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Shape/index contract violations (programming errors, not data errors).
class DimensionError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf produced by a forward computation; aborts the current step.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed corpus, embedding, or checkpoint content.
class DataError : public Error {
 public:
  using Error::Error;
};

// Checkpoint container problems (bad magic, version, checksum, truncation).
class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace jointex
