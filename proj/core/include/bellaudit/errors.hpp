#pragma once

#include <stdexcept>
#include <string>

namespace bellaudit {

// Bad parameters, unresolved labels, unreadable config. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI exit code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An expression binds outcomes that can never be recorded in one trial.
class IncompatibleMeasurements : public DataError {
 public:
  explicit IncompatibleMeasurements(const std::string& what)
      : DataError("incompatible measurements: " + what) {}
};

// Enumeration or atom-count guard exceeded.
class GuardExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bellaudit
