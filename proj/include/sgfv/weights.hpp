#pragma once

#include <string>
#include <string_view>

namespace sgfv {

enum class WeightVariant { Upwind, Bernoulli, Sigmoid, GeometricMean };

/// Weight function B of the generalized Scharfetter-Gummel flux together with
/// its coercivity constant alpha, i.e. B(s) >= 1 - alpha*s on [0, 1/alpha].
struct WeightKind {
  WeightVariant variant = WeightVariant::Bernoulli;

  double alpha() const noexcept;
  std::string_view name() const noexcept;

  /// Accepts "upwind", "bernoulli", "sigmoid", "geometric_mean".
  static WeightKind parse(std::string_view name);

  friend bool operator==(WeightKind, WeightKind) = default;
};

/// B(s) for s >= 0. Throws UsageError for negative or non-finite s.
double eval_B(WeightKind kind, double s);

/// B_kappa(s) = kappa * B(s / kappa). Throws ConfigError for kappa <= 0.
double eval_B_kappa(WeightKind kind, double kappa, double s);

/// Bernoulli function s/(e^s - 1) on the whole real line.
double bernoulli_signed(double s);

}  // namespace sgfv
