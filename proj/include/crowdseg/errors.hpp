#pragma once

#include <stdexcept>
#include <string>

namespace crowdseg {

// File and serialization failures (CLI exit code 2).
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments, bad config values, violated preconditions (CLI exit code 1).
struct ValueError : std::invalid_argument {
  explicit ValueError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Non-finite data where finite values are required (CLI exit code 3).
struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crowdseg
