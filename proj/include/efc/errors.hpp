#pragma once

#include <stdexcept>
#include <string>

namespace efc {

/// Malformed input data: ragged rows, unknown values, schema mismatches.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameters (thresholds out of range, unknown names, ...).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace efc
