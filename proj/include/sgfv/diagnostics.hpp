#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgfv/kernel.hpp"
#include "sgfv/mesh.hpp"
#include "sgfv/scheme.hpp"

namespace sgfv {

/// sum_i sum_K m(K) u (log u - 1), with 0 log 0 = 0. Negative cells are a UsageError.
double entropy_boltzmann(const Mesh& mesh, std::span<const Field> u);

/// (1/2) sum_i <u_i, (W u)_i>.
double entropy_rao(const DiscreteKernel& W, std::span<const Field> u);
/// Same value from precomputed potentials p = W u.
double entropy_rao(const Mesh& mesh, std::span<const Field> u, std::span<const Field> p);

struct Productions {
  double P_B = 0.0;
  double P_R = 0.0;
  double X = 0.0;
  double fisher = 0.0;
};

Productions productions(const Mesh& mesh, std::span<const Field> u, std::span<const Field> p,
                        const SchemeConfig& cfg);

struct InequalityCheck {
  double slack = 0.0;  // rhs - lhs; the inequality holds when slack >= -tolerance
  bool passed = true;
  bool asserted = true;
};

struct StepVerdicts {
  double tol_scale = 0.0;
  InequalityCheck boltzmann;
  InequalityCheck rao;
  InequalityCheck fisher;

  bool all_asserted_passed() const noexcept;
};

struct StepReport {
  std::size_t step = 0;
  double time = 0.0;
  std::vector<double> mass;
  double H_B = 0.0;
  double H_R = 0.0;
  Productions prod;
  int picard_iters = 0;
  double linear_residual = 0.0;
  std::size_t clamped = 0;
  StepVerdicts verdicts;
};

/// Entropy inequalities of one step, evaluated with the potentials attached
/// to `curr`. The Boltzmann and Fisher checks are asserted always; the Rao
/// check only with a PSD kernel or mid-point coupling.
StepVerdicts verify_step(const State& prev, const State& curr, const DiscreteKernel& W, const SchemeConfig& cfg,
                         const PsdReport& psd);

/// Report for `curr` (verdicts filled in when `prev` is given).
StepReport make_report(const State* prev, const State& curr, const DiscreteKernel& W, const SchemeConfig& cfg,
                       const PsdReport& psd, const StepStats* stats);

std::vector<std::string> report_header(int species);
std::vector<std::string> report_row(const StepReport& r);

/// Discrete mass sum_K m(K) u_K for every species.
std::vector<double> masses(const Mesh& mesh, std::span<const Field> u);

}  // namespace sgfv
