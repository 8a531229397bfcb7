#pragma once

#include <span>
#include <string_view>

#include "sgfv/mesh.hpp"

namespace sgfv {

/// How a fine reference solution is brought to a coarse mesh for comparison.
///   cell_average: measure-weighted average of the contained fine cells
///   center_value: fourth-order point value of the reference at coarse cell centers,
///                 reconstructed from four neighboring fine averages (no wrap across the seam)
enum class ReferenceProjection { CellAverage, CenterValue };

ReferenceProjection parse_projection(std::string_view name);
std::string_view projection_name(ReferenceProjection p) noexcept;

/// Per-axis refinement factor M_fine / M_coarse; UsageError unless the meshes
/// share the domain and the factor is a power of two.
std::vector<int> refinement_factors(const Mesh& fine, const Mesh& coarse);

Field coarsen(const Mesh& fine, std::span<const double> f, const Mesh& coarse);

Field center_values(const Mesh& fine, std::span<const double> f, const Mesh& coarse);

Field project_reference(const Mesh& fine, std::span<const double> f, const Mesh& coarse,
                        ReferenceProjection mode);

}  // namespace sgfv
