#pragma once

#include <stdexcept>
#include <string>

namespace hodgewave {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A configuration file that does not exist.
class NotFoundError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

// A linear solve or factorization failed; usually a sign of corrupted assembly.
class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace hodgewave
