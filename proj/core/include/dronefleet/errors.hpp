#pragma once

#include <stdexcept>
#include <string>

namespace dronefleet {

// Malformed scenario text (bad JSON, unknown key, wrong type, unknown kind).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// A structurally well-formed scenario that fails its invariants.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite total cost during optimization (learning rate too large).
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(int iteration, double last_finite_total, const std::string& what)
      : std::runtime_error(what),
        iteration(iteration),
        last_finite_total(last_finite_total) {}

  int iteration;
  double last_finite_total;
};

// Joint-action table would exceed the configured budget (JAL with many agents).
class TableBudgetError : public std::runtime_error {
 public:
  explicit TableBudgetError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dronefleet
