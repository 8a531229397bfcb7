#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "sgfv/mesh.hpp"

namespace sgfv {

/// Square matrix with a diagonal and a fixed number of off-diagonal slots per
/// row. Slots may repeat a column (two-cell axes); their values add up.
struct StencilMatrix {
  std::size_t rows = 0;
  int width = 0;
  std::vector<double> diag;
  std::vector<double> off;          // rows * width
  std::vector<CellIndex> columns;   // rows * width

  StencilMatrix() = default;
  StencilMatrix(std::size_t rows, int width);

  double offdiag(std::size_t row, int slot) const { return off[row * width + slot]; }
  CellIndex column(std::size_t row, int slot) const { return columns[row * width + slot]; }

  void multiply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> column_sums() const;
  /// Row-major dense copy (tests and small-system oracles).
  std::vector<double> to_dense() const;
};

/// A(p) u = S for one species.
struct LinearSystem {
  StencilMatrix A;
  Field S;
};

enum class LinearMethod { GaussSeidel, BiCGStab };

LinearMethod parse_linear_method(std::string_view name);

struct LinearSolverConfig {
  LinearMethod method = LinearMethod::BiCGStab;
  double rel_tol = 1e-12;
  int max_iter = 5000;
};

struct LinearSolveStats {
  int iterations = 0;
  /// ||A u - S||_inf / ||S||_inf of the returned field.
  double residual = 0.0;
  std::size_t clamped = 0;
  bool used_fallback = false;
  std::vector<double> history;
};

/// Solves an M-matrix system. With S >= 0 the result is strictly positive:
/// round-off undershoots are repaired by Gauss-Seidel sweeps and any value
/// left at or below zero is clamped to the smallest normal double (counted in
/// stats.clamped). Throws SolverFailure when the tolerance is not met.
Field solve_linear(const LinearSystem& sys, const LinearSolverConfig& cfg,
                   std::span<const double> initial_guess = {}, LinearSolveStats* stats = nullptr);

}  // namespace sgfv
