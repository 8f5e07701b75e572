#pragma once

#include <stdexcept>
#include <string>

namespace sgdg {

// Bad user input: unknown scenario, malformed key, out-of-range value.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Solver- or state-level failure: factorization breakdown, negative cell
// averages, non-finite data.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sgdg
