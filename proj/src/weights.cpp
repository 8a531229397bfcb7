#include "sgfv/weights.hpp"

#include <cmath>

#include "sgfv/error.hpp"

namespace sgfv {

namespace {

constexpr double kSeriesThreshold = 1e-5;
constexpr double kLargeArgument = 30.0;

}  // namespace

double WeightKind::alpha() const noexcept {
  switch (variant) {
    case WeightVariant::Upwind:
      return 0.0;
    case WeightVariant::Bernoulli:
    case WeightVariant::Sigmoid:
    case WeightVariant::GeometricMean:
      return 0.5;
  }
  return 0.5;
}

std::string_view WeightKind::name() const noexcept {
  switch (variant) {
    case WeightVariant::Upwind:
      return "upwind";
    case WeightVariant::Bernoulli:
      return "bernoulli";
    case WeightVariant::Sigmoid:
      return "sigmoid";
    case WeightVariant::GeometricMean:
      return "geometric_mean";
  }
  return "bernoulli";
}

WeightKind WeightKind::parse(std::string_view name) {
  if (name == "upwind") return {WeightVariant::Upwind};
  if (name == "bernoulli") return {WeightVariant::Bernoulli};
  if (name == "sigmoid") return {WeightVariant::Sigmoid};
  if (name == "geometric_mean") return {WeightVariant::GeometricMean};
  throw ConfigError("unknown weight function '" + std::string(name) + "'");
}

double bernoulli_signed(double s) {
  if (std::abs(s) < kSeriesThreshold) return 1.0 - s / 2.0 + s * s / 12.0;
  if (s > kLargeArgument) {
    const double e = std::exp(-s);
    return s * e / (-std::expm1(-s));
  }
  return s / std::expm1(s);
}

double eval_B(WeightKind kind, double s) {
  if (!std::isfinite(s) || s < 0.0) throw UsageError("eval_B: argument must be finite and >= 0");
  switch (kind.variant) {
    case WeightVariant::Upwind:
      return 1.0;
    case WeightVariant::Bernoulli:
      return bernoulli_signed(s);
    case WeightVariant::Sigmoid: {
      // 2/(e^s + 1) written without overflow
      const double e = std::exp(-s);
      return 2.0 * e / (1.0 + e);
    }
    case WeightVariant::GeometricMean:
      return std::exp(-0.5 * s);
  }
  return 1.0;
}

double eval_B_kappa(WeightKind kind, double kappa, double s) {
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw ConfigError("eval_B_kappa: kappa must be > 0");
  return kappa * eval_B(kind, s / kappa);
}

}  // namespace sgfv
