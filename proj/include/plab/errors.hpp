#pragma once

#include <stdexcept>
#include <string>

namespace plab {

// Input outside the mathematical domain of an operation (boundary point,
// non-finite coordinate, empty grid, ...).
class DomainError : public std::invalid_argument {
 public:
  explicit DomainError(const std::string& what) : std::invalid_argument(what) {}
};

// A numerical routine failed to reach its pinned tolerance (Newton stall,
// quadrature refinement disagreement, rejection acceptance collapse, ...).
class ConvergenceError : public std::runtime_error {
 public:
  explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Evaluation produced a non-finite value (overflow of exp, etc).
class EvaluationError : public std::runtime_error {
 public:
  explicit EvaluationError(const std::string& what) : std::runtime_error(what) {}
};

// Requested an exact capability the object does not provide.
class CapabilityError : public std::logic_error {
 public:
  explicit CapabilityError(const std::string& what) : std::logic_error(what) {}
};

// The model's structural assumptions failed at runtime (non-positive
// transport density, PSD violation beyond tolerance, ...).
class ModelViolation : public std::runtime_error {
 public:
  explicit ModelViolation(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration input.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace plab
