#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace velo {

/// Invalid configuration or arguments supplied by the caller.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input data unusable for the requested computation (empty, degenerate,
/// insufficient, or outside the method's domain).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed ledger input; carries the 1-based line number.
class LedgerParseError : public std::runtime_error {
 public:
  LedgerParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace velo
