#pragma once

#include <stdexcept>
#include <string>

namespace rfa {

/// Bad arguments or configuration (CLI exit code 1).
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Unreadable, malformed or inconsistent input data (CLI exit code 2).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Numerical failure that invalidates a whole run (CLI exit code 3).
/// Per-site fit failures are reported as flags, not exceptions.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rfa
