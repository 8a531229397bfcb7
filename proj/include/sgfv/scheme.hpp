#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "sgfv/kernel.hpp"
#include "sgfv/linear_solver.hpp"
#include "sgfv/mesh.hpp"
#include "sgfv/weights.hpp"

namespace sgfv {

enum class Coupling { Implicit, Midpoint };

Coupling parse_coupling(std::string_view name);
std::string_view coupling_name(Coupling c) noexcept;

struct SchemeConfig {
  double kappa = 1.0;
  double dt = 1e-2;
  double T = 0.0;
  WeightKind weight{};
  Coupling coupling = Coupling::Implicit;
  double picard_tol = 1e-10;
  int picard_max_iter = 200;
  LinearSolverConfig linear{};

  void validate() const;
  /// round(T / dt); ConfigError unless T is an integer multiple of dt.
  std::size_t num_steps() const;
};

/// Densities at time level `step`, plus the potentials of the final linear
/// solve that produced them (empty for initial data).
struct State {
  std::size_t step = 0;
  std::vector<Field> u;
  std::vector<Field> p;

  int species() const noexcept { return static_cast<int>(u.size()); }
};

/// F_{K,sigma} seen from the owner of `edge`; the neighbor sees the negation.
double edge_flux(std::span<const double> u, std::span<const double> p, const Mesh& mesh, const EdgeId& edge,
                 const SchemeConfig& cfg);

/// A(p) u = S(u_prev) for one species.
LinearSystem assemble(std::span<const double> u_prev, std::span<const double> p, const SchemeConfig& cfg,
                      const Mesh& mesh);

/// max_K |m(K)(u_K - u_prev_K)/dt + sum_sigma F_{K,sigma}(u, p)|.
double scheme_residual(std::span<const double> u_prev, std::span<const double> u, std::span<const double> p,
                       const SchemeConfig& cfg, const Mesh& mesh);

struct StepStats {
  int picard_iters = 0;
  std::vector<double> picard_errors;
  int linear_iters = 0;
  double linear_residual = 0.0;  // worst relative residual of the final solves
  std::size_t clamped = 0;
  bool linear_fallback = false;
};

struct StepOutcome {
  State state;
  StepStats stats;
};

/// One implicit Euler step solved by Picard iteration on the potentials.
/// Throws StepFailure when the iteration does not converge.
StepOutcome advance(const State& prev, const DiscreteKernel& W, const SchemeConfig& cfg);

using StepObserver = std::function<void(const State& prev, const State& curr, const StepStats& stats)>;

struct RunResult {
  State final_state;
  std::vector<StepStats> steps;
};

RunResult run(const SchemeConfig& cfg, State initial, const DiscreteKernel& W,
              std::span<const StepObserver> observers = {});

}  // namespace sgfv
