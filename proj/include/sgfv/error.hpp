#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sgfv {

/// Invalid mesh, kernel, scheme or experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated a precondition (bad axis, mismatched fields, ...).
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Non-finite values reached a numerical routine.
class NumericalStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Linear solver ran out of iterations.
class SolverFailure : public std::runtime_error {
 public:
  SolverFailure(const std::string& what, std::vector<double> residual_history)
      : std::runtime_error(what), residual_history_(std::move(residual_history)) {}

  const std::vector<double>& residual_history() const noexcept { return residual_history_; }

 private:
  std::vector<double> residual_history_;
};

/// A time step could not be completed (Picard budget exhausted or a nested solver failure).
class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, std::size_t step, std::vector<double> picard_errors)
      : std::runtime_error(what), step_(step), picard_errors_(std::move(picard_errors)) {}

  std::size_t step() const noexcept { return step_; }
  const std::vector<double>& picard_errors() const noexcept { return picard_errors_; }

 private:
  std::size_t step_;
  std::vector<double> picard_errors_;
};

}  // namespace sgfv
