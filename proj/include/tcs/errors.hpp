#pragma once

#include <stdexcept>
#include <string>

namespace tcs {

// Bad argument values (negative lengths, out-of-range probabilities, ...).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed configuration: unknown keys, wrong types, unknown enum names.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solver failed to converge or lost stability.
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

class StabilityError : public SolverError {
 public:
  explicit StabilityError(const std::string& what) : SolverError(what) {}
};

class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace tcs
