#pragma once

#include <stdexcept>
#include <string>

namespace weylcheck {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller broke an operation's precondition (bad slot, wrong variance,
/// asymmetric factor, unknown model name).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Arithmetic broke down at a chart point: singular metric, jet division by
/// zero, elementary function outside its domain.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration file or command line.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace weylcheck
