#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgfv {

/// Cell-indexed scalar field (one value per control volume, row-major order).
using Field = std::vector<double>;

using CellIndex = std::size_t;

/// Geometry of a uniform periodic tensor mesh: per-axis interval [lower, upper)
/// split into `cells` identical intervals.
struct MeshSpec {
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<int> cells;

  int dim() const noexcept { return static_cast<int>(cells.size()); }

  /// Throws ConfigError unless d >= 1, every axis has at least two cells and a
  /// positive extent.
  void validate() const;

  static MeshSpec uniform(int dim, double lower, double upper, int cells_per_axis);
};

/// One undirected edge sigma = K|L, enumerated once from its owner K in the +axis direction.
struct EdgeId {
  CellIndex owner;
  CellIndex neighbor;
  int axis;  // 0-based
};

/// Uniform Cartesian mesh of a torus. Immutable after construction.
///
/// Cells are linearized row-major (the last axis varies fastest). For every
/// axis the edge measure is m(K)/dx, so the transmissibility m(sigma)/dx is
/// well defined in 1D as well (m(sigma) = 1 there).
class Mesh {
 public:
  explicit Mesh(MeshSpec spec);

  const MeshSpec& spec() const noexcept { return spec_; }
  int dim() const noexcept { return spec_.dim(); }
  std::size_t num_cells() const noexcept { return num_cells_; }
  std::size_t num_edges() const noexcept { return num_cells_ * static_cast<std::size_t>(dim()); }

  int cells(int axis) const { return spec_.cells.at(static_cast<std::size_t>(axis)); }
  double lower(int axis) const { return spec_.lower.at(static_cast<std::size_t>(axis)); }
  double length(int axis) const;
  double dx(int axis) const { return dx_.at(static_cast<std::size_t>(axis)); }
  /// Mesh size h = max dx.
  double h() const noexcept { return h_; }

  double cell_measure() const noexcept { return cell_measure_; }
  double edge_measure(int axis) const { return cell_measure_ / dx(axis); }
  double transmissibility(int axis) const { return tau_.at(static_cast<std::size_t>(axis)); }
  double domain_measure() const noexcept;

  std::size_t stride(int axis) const { return stride_.at(static_cast<std::size_t>(axis)); }
  CellIndex linear_index(std::span<const int> multi) const;
  std::vector<int> multi_index(CellIndex k) const;
  int axis_index(CellIndex k, int axis) const;

  /// Cell reached by `step` (+1 or -1) along `axis` with periodic wraparound.
  CellIndex neighbor(CellIndex k, int axis, int step) const;

  double center(CellIndex k, int axis) const;

  template <typename F>
  void for_each_edge(F&& f) const {
    for (CellIndex k = 0; k < num_cells_; ++k)
      for (int a = 0; a < dim(); ++a) f(EdgeId{k, plus_[static_cast<std::size_t>(a)][k], a});
  }
  std::vector<EdgeId> edges() const;

  bool same_geometry(const Mesh& other) const noexcept;

 private:
  MeshSpec spec_;
  std::size_t num_cells_ = 0;
  std::vector<double> dx_;
  std::vector<double> tau_;
  std::vector<std::size_t> stride_;
  double cell_measure_ = 0.0;
  double h_ = 0.0;
  std::vector<std::vector<CellIndex>> plus_;
  std::vector<std::vector<CellIndex>> minus_;
};

Mesh build_mesh(const MeshSpec& spec);

/// Discrete integral sum_K m(K) f_K.
double integrate(const Mesh& mesh, std::span<const double> f);

}  // namespace sgfv
