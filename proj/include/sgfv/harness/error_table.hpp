#pragma once

#include <span>
#include <string>
#include <vector>

#include "sgfv/mesh.hpp"

namespace sgfv {

struct ErrorNorms {
  double linf = 0.0;
  double l1 = 0.0;
};

/// L-inf = max |a - b|, L1 = sum_K m(K) |a - b|.
ErrorNorms error_norms(const Mesh& mesh, std::span<const double> a, std::span<const double> b);

struct ErrorRow {
  double resolution = 0.0;  // dx or dt
  std::vector<ErrorNorms> species;
};

struct ErrorTable {
  std::string resolution_label = "dx";
  std::vector<ErrorRow> rows;
};

struct RateFit {
  double order = 0.0;            // least-squares slope of log(err) against log(resolution)
  double last_pair_order = 0.0;  // two-point order of the two finest rows
  int points = 0;                // rows used (zero errors are skipped)
};

struct SpeciesOrders {
  RateFit linf;
  RateFit l1;
};

/// Least-squares order; zero (or non-finite) errors are skipped with a logged notice.
RateFit fit_power_law(std::span<const double> resolution, std::span<const double> error);

/// Needs at least three rows with strictly decreasing resolution (UsageError otherwise).
std::vector<SpeciesOrders> fit_rate(const ErrorTable& table);

}  // namespace sgfv
