#pragma once

#include <stdexcept>
#include <string>

namespace omc {

// Error taxonomy used across the engine. The CLI maps these to exit codes:
// ConfigError -> 3, DivergenceError/DegeneracyError/ConsistencyError -> 2.

// Invalid or contradictory configuration (bad dims, eta and c both set, ...).
struct ConfigError : std::invalid_argument {
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

// Iterates blew up: non-finite values or f grew 10x over its initial value.
struct DivergenceError : std::runtime_error {
  long long step = -1;
  explicit DivergenceError(const std::string& what, long long at_step = -1)
      : std::runtime_error(what), step(at_step) {}
};

// Rank collapse: a factor lost numerical rank k (sigma_min below floor).
struct DegeneracyError : std::runtime_error {
  long long step = -1;
  explicit DegeneracyError(const std::string& what, long long at_step = -1)
      : std::runtime_error(what), step(at_step) {}
};

// Internal invariant broke (cached gram drifted past tolerance). Signals a
// bug or numerically hostile run, not a user error.
struct ConsistencyError : std::logic_error {
  explicit ConsistencyError(const std::string& what) : std::logic_error(what) {}
};

}  // namespace omc
