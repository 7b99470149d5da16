#pragma once

#include <stdexcept>
#include <string>

namespace procaudit {

// Input that cannot be processed: malformed CSV, header mismatch, empty data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parameters outside their documented range.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace procaudit
