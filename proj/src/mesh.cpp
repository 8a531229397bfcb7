#include "sgfv/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgfv/error.hpp"

namespace sgfv {

void MeshSpec::validate() const {
  if (cells.empty()) throw ConfigError("mesh: dimension must be at least 1");
  if (lower.size() != cells.size() || upper.size() != cells.size())
    throw ConfigError("mesh: lower/upper/cells must have one entry per axis");
  for (std::size_t a = 0; a < cells.size(); ++a) {
    if (cells[a] < 2)
      throw ConfigError("mesh: axis " + std::to_string(a) + " needs at least 2 cells");
    if (!std::isfinite(lower[a]) || !std::isfinite(upper[a]) || !(upper[a] > lower[a]))
      throw ConfigError("mesh: axis " + std::to_string(a) + " has a degenerate extent");
  }
}

MeshSpec MeshSpec::uniform(int dim, double lower, double upper, int cells_per_axis) {
  const auto d = static_cast<std::size_t>(dim);
  return MeshSpec{std::vector<double>(d, lower), std::vector<double>(d, upper),
                  std::vector<int>(d, cells_per_axis)};
}

Mesh::Mesh(MeshSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const int d = dim();
  num_cells_ = 1;
  for (int c : spec_.cells) num_cells_ *= static_cast<std::size_t>(c);

  dx_.resize(static_cast<std::size_t>(d));
  stride_.resize(static_cast<std::size_t>(d));
  cell_measure_ = 1.0;
  for (int a = 0; a < d; ++a) {
    dx_[a] = length(a) / cells(a);
    cell_measure_ *= dx_[a];
  }
  h_ = *std::max_element(dx_.begin(), dx_.end());
  tau_.resize(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) tau_[a] = edge_measure(a) / dx_[a];

  std::size_t s = 1;
  for (int a = d - 1; a >= 0; --a) {
    stride_[a] = s;
    s *= static_cast<std::size_t>(cells(a));
  }

  plus_.assign(static_cast<std::size_t>(d), std::vector<CellIndex>(num_cells_));
  minus_.assign(static_cast<std::size_t>(d), std::vector<CellIndex>(num_cells_));
  for (CellIndex k = 0; k < num_cells_; ++k) {
    for (int a = 0; a < d; ++a) {
      const auto m = static_cast<std::size_t>(cells(a));
      const std::size_t i = (k / stride_[a]) % m;
      const CellIndex base = k - i * stride_[a];
      plus_[a][k] = base + ((i + 1) % m) * stride_[a];
      minus_[a][k] = base + ((i + m - 1) % m) * stride_[a];
    }
  }
}

double Mesh::length(int axis) const {
  const auto a = static_cast<std::size_t>(axis);
  return spec_.upper.at(a) - spec_.lower.at(a);
}

double Mesh::domain_measure() const noexcept {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= length(a);
  return v;
}

CellIndex Mesh::linear_index(std::span<const int> multi) const {
  if (static_cast<int>(multi.size()) != dim()) throw UsageError("mesh: multi-index has wrong rank");
  CellIndex k = 0;
  for (int a = 0; a < dim(); ++a) {
    const int m = cells(a);
    const int i = ((multi[a] % m) + m) % m;
    k += static_cast<std::size_t>(i) * stride_[a];
  }
  return k;
}

std::vector<int> Mesh::multi_index(CellIndex k) const {
  std::vector<int> out(static_cast<std::size_t>(dim()));
  for (int a = 0; a < dim(); ++a) out[a] = axis_index(k, a);
  return out;
}

int Mesh::axis_index(CellIndex k, int axis) const {
  return static_cast<int>((k / stride_.at(static_cast<std::size_t>(axis))) %
                          static_cast<std::size_t>(cells(axis)));
}

CellIndex Mesh::neighbor(CellIndex k, int axis, int step) const {
  if (axis < 0 || axis >= dim()) throw UsageError("mesh: axis out of range");
  if (k >= num_cells_) throw UsageError("mesh: cell index out of range");
  if (step == 1) return plus_[axis][k];
  if (step == -1) return minus_[axis][k];
  throw UsageError("mesh: neighbor step must be +1 or -1");
}

double Mesh::center(CellIndex k, int axis) const {
  return lower(axis) + (axis_index(k, axis) + 0.5) * dx(axis);
}

std::vector<EdgeId> Mesh::edges() const {
  std::vector<EdgeId> out;
  out.reserve(num_edges());
  for_each_edge([&](const EdgeId& e) { out.push_back(e); });
  return out;
}

bool Mesh::same_geometry(const Mesh& other) const noexcept {
  return spec_.cells == other.spec_.cells && spec_.lower == other.spec_.lower &&
         spec_.upper == other.spec_.upper;
}

Mesh build_mesh(const MeshSpec& spec) { return Mesh(spec); }

double integrate(const Mesh& mesh, std::span<const double> f) {
  if (f.size() != mesh.num_cells()) throw UsageError("integrate: field size does not match mesh");
  double s = 0.0;
  for (double v : f) s += v;
  return s * mesh.cell_measure();
}

}  // namespace sgfv
