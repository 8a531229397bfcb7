#pragma once

#include <vector>

namespace sgfv {

/// Gauss-Legendre rule mapped to [0, 1]; weights sum to 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes are symmetric about 1/2. Throws ConfigError unless 1 <= order <= 64.
QuadratureRule gauss_legendre(int order);

}  // namespace sgfv
