#pragma once

#include <stdexcept>
#include <string>

namespace subnorm {

// Bad input: out-of-range index, negative lambda, malformed config.
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Request exceeds a documented size cap (e.g. brute force beyond p <= 12).
class CapabilityError : public std::runtime_error {
 public:
  explicit CapabilityError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure with diagnostics attached: KKT residual above tolerance,
// min-norm-point non-convergence, duality gap too large.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace subnorm
