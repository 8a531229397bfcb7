#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sgfv/mesh.hpp"

namespace sgfv {

enum class InitialKind { Constant, Box, Trig };

/// Built-in initial profiles.
///   constant: amplitude
///   box:      amplitude on [lower, upper] (per axis), 0 elsewhere
///   trig:     amplitude * f(2 pi k.x) + offset with f = sin or cos
/// With `mass` set, the projected field is rescaled to that discrete mass.
struct InitialDescriptor {
  InitialKind kind = InitialKind::Constant;
  double amplitude = 1.0;
  std::vector<double> lower;
  std::vector<double> upper;
  bool cosine = false;
  std::vector<double> wavevector;
  double offset = 0.0;
  std::optional<double> mass;

  double value(std::span<const double> x) const;
  /// Throws ConfigError when inconsistent with `mesh`.
  void validate(const Mesh& mesh) const;
};

/// Cell averages m(K)^{-1} int_K u0: exact for constants and boxes, tensor
/// Gauss-Legendre of order 6 for trigonometric profiles.
Field project_initial(const InitialDescriptor& desc, const Mesh& mesh);

}  // namespace sgfv
