#pragma once

#include <stdexcept>
#include <string>

#include "sgbl/linalg.hpp"

namespace sgbl {

/// Invalid parameters or violated preconditions. Maps to CLI exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DimensionError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// A computation that cannot proceed numerically (non-finite gradient,
/// sampler stuck on the support boundary, optimizer did not converge).
/// Maps to CLI exit code 3. Carries the offending state when one exists.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what, Vector state = {})
      : std::runtime_error(what), state_(std::move(state)) {}

  const Vector& state() const noexcept { return state_; }

 private:
  Vector state_;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw ConfigError(msg);
}

inline void require_dims(Index a, Index b, const char* what) {
  if (a != b) {
    throw DimensionError(std::string(what) + ": dimension mismatch (" +
                         std::to_string(a) + " vs " + std::to_string(b) + ")");
  }
}

}  // namespace sgbl
