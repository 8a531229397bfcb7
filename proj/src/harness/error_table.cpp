#include "sgfv/harness/error_table.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <spdlog/spdlog.h>

#include "sgfv/error.hpp"

namespace sgfv {

ErrorNorms error_norms(const Mesh& mesh, std::span<const double> a, std::span<const double> b) {
  if (a.size() != mesh.num_cells() || b.size() != mesh.num_cells())
    throw UsageError("error_norms: fields do not match the mesh");
  ErrorNorms e;
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = std::abs(a[k] - b[k]);
    e.linf = std::max(e.linf, d);
    s += d;
  }
  e.l1 = s * mesh.cell_measure();
  return e;
}

RateFit fit_power_law(std::span<const double> resolution, std::span<const double> error) {
  if (resolution.size() != error.size()) throw UsageError("fit_power_law: size mismatch");
  std::vector<double> x, y;
  for (std::size_t k = 0; k < error.size(); ++k) {
    if (!(error[k] > 0.0) || !std::isfinite(error[k])) {
      spdlog::info("rate fit: skipping row {} with error {}", k, error[k]);
      continue;
    }
    x.push_back(std::log(resolution[k]));
    y.push_back(std::log(error[k]));
  }
  RateFit fit;
  fit.points = static_cast<int>(x.size());
  const double nan = std::numeric_limits<double>::quiet_NaN();
  if (x.size() < 2) {
    fit.order = fit.last_pair_order = nan;
    return fit;
  }
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  fit.order = sxy / sxx;
  const std::size_t l = x.size() - 1;
  fit.last_pair_order = (y[l] - y[l - 1]) / (x[l] - x[l - 1]);
  return fit;
}

std::vector<SpeciesOrders> fit_rate(const ErrorTable& table) {
  if (table.rows.size() < 3) throw UsageError("fit_rate: need at least three rows");
  for (std::size_t k = 1; k < table.rows.size(); ++k)
    if (!(table.rows[k].resolution < table.rows[k - 1].resolution))
      throw UsageError("fit_rate: resolutions must be strictly decreasing");
  const std::size_t species = table.rows.front().species.size();
  std::vector<double> res, linf, l1;
  std::vector<SpeciesOrders> out(species);
  for (std::size_t i = 0; i < species; ++i) {
    res.clear();
    linf.clear();
    l1.clear();
    for (const auto& row : table.rows) {
      if (row.species.size() != species) throw UsageError("fit_rate: ragged table");
      res.push_back(row.resolution);
      linf.push_back(row.species[i].linf);
      l1.push_back(row.species[i].l1);
    }
    out[i].linf = fit_power_law(res, linf);
    out[i].l1 = fit_power_law(res, l1);
  }
  return out;
}

}  // namespace sgfv
