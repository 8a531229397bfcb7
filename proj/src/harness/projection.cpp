#include "sgfv/harness/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgfv/error.hpp"
#include "sgfv/fft.hpp"

namespace sgfv {

namespace {

// Applies a 1D linear map along `axis` of a row-major array, shrinking that
// axis from n_in to n_out entries.
template <typename Op>
std::vector<double> along_axis(std::span<const double> in, std::vector<int>& dims, int axis, int n_out, Op op) {
  std::size_t inner = 1, outer = 1;
  for (std::size_t a = 0; a < dims.size(); ++a) {
    if (static_cast<int>(a) < axis) outer *= static_cast<std::size_t>(dims[a]);
    if (static_cast<int>(a) > axis) inner *= static_cast<std::size_t>(dims[a]);
  }
  const auto n_in = static_cast<std::size_t>(dims[static_cast<std::size_t>(axis)]);
  std::vector<double> out(outer * inner * static_cast<std::size_t>(n_out));
  std::vector<double> line(n_in);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      for (std::size_t j = 0; j < n_in; ++j) line[j] = in[(o * n_in + j) * inner + i];
      for (int c = 0; c < n_out; ++c)
        out[(o * static_cast<std::size_t>(n_out) + static_cast<std::size_t>(c)) * inner + i] = op(line, c);
    }
  }
  dims[static_cast<std::size_t>(axis)] = n_out;
  return out;
}

// Derivative at x0 of the quartic interpolating the primitive of the cell
// averages line[s..s+3] (cell i spans [i, i+1]); exact for cubic profiles.
// Stencils stay inside the fundamental domain, so a reference that jumps
// across the periodic seam is not smeared.
double point_from_averages(const std::vector<double>& line, int s, double x0) {
  double prim[5] = {0.0, 0.0, 0.0, 0.0, 0.0};
  for (int k = 1; k < 5; ++k) prim[k] = prim[k - 1] + line[static_cast<std::size_t>(s + k - 1)];
  double v = 0.0;
  for (int k = 0; k < 5; ++k) {
    const double tk = s + k;
    double deriv = 0.0;
    for (int l = 0; l < 5; ++l) {
      if (l == k) continue;
      double prod = 1.0 / (tk - (s + l));
      for (int q = 0; q < 5; ++q) {
        if (q == k || q == l) continue;
        prod *= (x0 - (s + q)) / (tk - (s + q));
      }
      deriv += prod;
    }
    v += prim[k] * deriv;
  }
  return v;
}

}  // namespace

ReferenceProjection parse_projection(std::string_view name) {
  if (name == "cell_average") return ReferenceProjection::CellAverage;
  if (name == "center_value") return ReferenceProjection::CenterValue;
  throw ConfigError("unknown reference projection '" + std::string(name) + "'");
}

std::string_view projection_name(ReferenceProjection p) noexcept {
  return p == ReferenceProjection::CellAverage ? "cell_average" : "center_value";
}

std::vector<int> refinement_factors(const Mesh& fine, const Mesh& coarse) {
  if (fine.dim() != coarse.dim()) throw UsageError("projection: dimension mismatch");
  std::vector<int> r(static_cast<std::size_t>(fine.dim()));
  for (int a = 0; a < fine.dim(); ++a) {
    const double tol = 1e-12 * fine.length(a);
    if (std::abs(fine.lower(a) - coarse.lower(a)) > tol || std::abs(fine.length(a) - coarse.length(a)) > tol)
      throw UsageError("projection: meshes cover different domains");
    const int mf = fine.cells(a), mc = coarse.cells(a);
    if (mf % mc != 0 || !is_power_of_two(static_cast<std::size_t>(mf / mc)))
      throw UsageError("projection: fine mesh is not a power-of-two refinement of the coarse mesh");
    r[a] = mf / mc;
  }
  return r;
}

Field coarsen(const Mesh& fine, std::span<const double> f, const Mesh& coarse) {
  if (f.size() != fine.num_cells()) throw UsageError("coarsen: field size does not match mesh");
  const auto r = refinement_factors(fine, coarse);
  std::vector<int> dims = fine.spec().cells;
  std::vector<double> cur(f.begin(), f.end());
  for (int a = 0; a < fine.dim(); ++a) {
    const int ra = r[a];
    cur = along_axis(cur, dims, a, coarse.cells(a), [ra](const std::vector<double>& line, int c) {
      double s = 0.0;
      for (int j = 0; j < ra; ++j) s += line[static_cast<std::size_t>(c * ra + j)];
      return s / ra;
    });
  }
  return cur;
}

Field center_values(const Mesh& fine, std::span<const double> f, const Mesh& coarse) {
  if (f.size() != fine.num_cells()) throw UsageError("center_values: field size does not match mesh");
  const auto r = refinement_factors(fine, coarse);
  std::vector<int> dims = fine.spec().cells;
  std::vector<double> cur(f.begin(), f.end());
  for (int a = 0; a < fine.dim(); ++a) {
    const int ra = r[a];
    const int m = fine.cells(a);
    if (m < 4) throw UsageError("center_values: fine mesh needs at least four cells per axis");
    cur = along_axis(cur, dims, a, coarse.cells(a), [ra, m](const std::vector<double>& line, int c) {
      // position of the coarse center in fine-cell units
      const double x0 = c * ra + 0.5 * ra;
      const int j = static_cast<int>(std::floor(x0 - 0.5));
      const int s = std::clamp(j - 1, 0, m - 4);
      return point_from_averages(line, s, x0);
    });
  }
  return cur;
}

Field project_reference(const Mesh& fine, std::span<const double> f, const Mesh& coarse, ReferenceProjection mode) {
  return mode == ReferenceProjection::CellAverage ? coarsen(fine, f, coarse) : center_values(fine, f, coarse);
}

}  // namespace sgfv
