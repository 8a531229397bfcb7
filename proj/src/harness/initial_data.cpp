#include "sgfv/harness/initial_data.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sgfv/error.hpp"
#include "sgfv/quadrature.hpp"

namespace sgfv {

double InitialDescriptor::value(std::span<const double> x) const {
  switch (kind) {
    case InitialKind::Constant:
      return amplitude;
    case InitialKind::Box:
      for (std::size_t a = 0; a < x.size(); ++a)
        if (x[a] < lower[a] || x[a] > upper[a]) return 0.0;
      return amplitude;
    case InitialKind::Trig: {
      double phase = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) phase += wavevector[a] * x[a];
      phase *= 2.0 * std::numbers::pi;
      return amplitude * (cosine ? std::cos(phase) : std::sin(phase)) + offset;
    }
  }
  return 0.0;
}

void InitialDescriptor::validate(const Mesh& mesh) const {
  const auto d = static_cast<std::size_t>(mesh.dim());
  if (!std::isfinite(amplitude) || !std::isfinite(offset)) throw ConfigError("initial data: non-finite parameter");
  if (kind == InitialKind::Box) {
    if (lower.size() != d || upper.size() != d) throw ConfigError("initial data: box needs one bound per axis");
    for (std::size_t a = 0; a < d; ++a) {
      const int ax = static_cast<int>(a);
      const double lo = mesh.lower(ax), hi = lo + mesh.length(ax);
      if (!(upper[a] > lower[a])) throw ConfigError("initial data: box bounds are degenerate");
      if (lower[a] < lo - 1e-12 * mesh.length(ax) || upper[a] > hi + 1e-12 * mesh.length(ax))
        throw ConfigError("initial data: box lies outside the domain");
    }
  }
  if (kind == InitialKind::Trig && wavevector.size() != d)
    throw ConfigError("initial data: wavevector needs one entry per axis");
  if (mass && !(std::isfinite(*mass))) throw ConfigError("initial data: mass must be finite");
}

Field project_initial(const InitialDescriptor& desc, const Mesh& mesh) {
  desc.validate(mesh);
  const std::size_t n = mesh.num_cells();
  const int d = mesh.dim();
  Field u(n, 0.0);
  switch (desc.kind) {
    case InitialKind::Constant:
      std::fill(u.begin(), u.end(), desc.amplitude);
      break;
    case InitialKind::Box:
      for (CellIndex k = 0; k < n; ++k) {
        double frac = 1.0;
        for (int a = 0; a < d && frac > 0.0; ++a) {
          const double h = mesh.dx(a);
          const double c0 = mesh.center(k, a) - 0.5 * h;
          const double overlap = std::min(c0 + h, desc.upper[a]) - std::max(c0, desc.lower[a]);
          frac *= std::clamp(overlap / h, 0.0, 1.0);
        }
        u[k] = desc.amplitude * frac;
      }
      break;
    case InitialKind::Trig: {
      const auto rule = gauss_legendre(6);
      const std::size_t q = rule.nodes.size();
      std::size_t points = 1;
      for (int a = 0; a < d; ++a) points *= q;
      std::vector<double> x(static_cast<std::size_t>(d));
      for (CellIndex k = 0; k < n; ++k) {
        double s = 0.0;
        for (std::size_t p = 0; p < points; ++p) {
          std::size_t r = p;
          double w = 1.0;
          for (int a = d - 1; a >= 0; --a) {
            const std::size_t qi = r % q;
            r /= q;
            w *= rule.weights[qi];
            x[a] = mesh.center(k, a) + (rule.nodes[qi] - 0.5) * mesh.dx(a);
          }
          s += w * desc.value(x);
        }
        u[k] = s;
      }
      break;
    }
  }
  if (desc.mass) {
    const double current = integrate(mesh, u);
    if (current == 0.0) throw ConfigError("initial data: cannot normalize a profile with zero mass");
    const double scale = *desc.mass / current;
    for (double& v : u) v *= scale;
  }
  return u;
}

}  // namespace sgfv
