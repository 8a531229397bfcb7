#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "sgfv/fft.hpp"
#include "sgfv/mesh.hpp"

namespace sgfv {

enum class KernelShapeKind { Gaussian, TopHat };

/// Unit-strength even kernel profile.
///   Gaussian(eps): exp(-|z|^2 / (2 eps^2)) / sqrt(2 pi eps^2)
///   TopHat(R):     1/(2R) on the box [-R, R]^d
struct KernelShape {
  KernelShapeKind kind = KernelShapeKind::Gaussian;
  double width = 1.0;  // eps or R

  static KernelShape gaussian(double eps) { return {KernelShapeKind::Gaussian, eps}; }
  static KernelShape tophat(double radius) { return {KernelShapeKind::TopHat, radius}; }

  double amplitude() const;
  /// 1D profile factor; the d-dimensional kernel is amplitude() * prod factor(z_l).
  double factor(double z) const;
  double value(std::span<const double> z) const;
  std::string_view name() const noexcept;

  friend bool operator==(const KernelShape&, const KernelShape&) = default;
};

enum class KernelExtension { WholeSpace, PeriodicWrap };

KernelExtension parse_extension(std::string_view name);
std::string_view extension_name(KernelExtension ext) noexcept;

struct PairKernel {
  KernelShape shape;
  double strength = 0.0;  // alpha_ij: > 0 repulsive, < 0 attractive
};

struct KernelSpec {
  int species = 1;
  std::vector<PairKernel> pairs;  // species x species, row-major
  KernelExtension extension = KernelExtension::PeriodicWrap;
  int quadrature_order = 4;

  const PairKernel& pair(int i, int j) const;
  PairKernel& pair(int i, int j);

  /// Throws ConfigError on asymmetric strengths/shapes or nonpositive widths.
  void validate() const;

  static KernelSpec zero(int species);
  /// Same shape for every pair; strengths row-major.
  static KernelSpec uniform(int species, KernelShape shape, std::vector<double> strengths,
                            KernelExtension extension, int quadrature_order = 4);
};

/// Cell-offset table w[Delta]. PeriodicWrap tables are indexed by Delta mod M
/// per axis; WholeSpace tables hold every signed offset -(M-1)..(M-1).
class OffsetTable {
 public:
  OffsetTable() = default;
  OffsetTable(std::vector<int> cells, KernelExtension extension);

  KernelExtension extension() const noexcept { return extension_; }
  const std::vector<int>& cells() const noexcept { return cells_; }
  const std::vector<int>& extent() const noexcept { return extent_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }

  /// Signed per-axis offset, |delta_l| < M_l.
  double at(std::span<const int> delta) const;
  double& at(std::span<const int> delta);
  /// Entry W_KJ for cells K and J of `mesh`.
  double between(const Mesh& mesh, CellIndex k, CellIndex j) const;

  bool is_zero() const noexcept;

 private:
  std::size_t slot(std::span<const int> delta) const;

  KernelExtension extension_ = KernelExtension::PeriodicWrap;
  std::vector<int> cells_;
  std::vector<int> extent_;
  std::vector<std::size_t> stride_;
  std::vector<double> values_;
};

enum class ConvolutionBackend { Direct, Fast, Auto };

ConvolutionBackend parse_backend(std::string_view name);

/// True when the fast path can serve this mesh (every M_l a power of two).
bool fast_path_available(const Mesh& mesh) noexcept;

/// Backend actually used for `requested`; logs a notice when Fast is unavailable.
ConvolutionBackend resolve_backend(const Mesh& mesh, ConvolutionBackend requested);

/// g_K = sum_J m(J) w[K - J] f_J.
Field convolve(const Mesh& mesh, const OffsetTable& w, std::span<const double> f,
               ConvolutionBackend backend = ConvolutionBackend::Auto);

/// Per-pair offset tables on a fixed mesh plus cached Fourier symbols.
class DiscreteKernel {
 public:
  DiscreteKernel(const Mesh& mesh, int species, KernelExtension extension,
                 std::vector<OffsetTable> tables,
                 ConvolutionBackend backend = ConvolutionBackend::Auto);

  const Mesh& mesh() const noexcept { return mesh_; }
  int species() const noexcept { return species_; }
  KernelExtension extension() const noexcept { return extension_; }
  ConvolutionBackend backend() const noexcept { return backend_; }
  const OffsetTable& table(int i, int j) const;
  bool is_zero() const noexcept;

  /// p_i = sum_j W^{ij} * u_j.
  std::vector<Field> potential(std::span<const Field> u) const;
  Field apply(int i, int j, std::span<const double> f) const;

 private:
  struct Spectral;

  Mesh mesh_;
  int species_;
  KernelExtension extension_;
  ConvolutionBackend backend_;
  std::vector<OffsetTable> tables_;
  std::vector<bool> zero_;
  std::shared_ptr<const Spectral> spectral_;
};

DiscreteKernel discretize(const KernelSpec& spec, const Mesh& mesh,
                          ConvolutionBackend backend = ConvolutionBackend::Auto);

/// Cell-pair average of an arbitrary kernel by tensor Gauss-Legendre
/// quadrature on both cells. PeriodicWrap evaluates at the nearest image.
OffsetTable average_kernel(const std::function<double(std::span<const double>)>& W,
                           const Mesh& mesh, KernelExtension extension, int quadrature_order);

std::vector<Field> potential_implicit(const DiscreteKernel& W, std::span<const Field> u);
std::vector<Field> potential_midpoint(const DiscreteKernel& W, std::span<const Field> u_curr,
                                      std::span<const Field> u_prev);

struct PsdReport {
  bool is_psd = true;
  double min_eigenvalue = 0.0;
  /// False when the whole-space verdict comes from the circulant embedding bound.
  bool exact = true;
};

PsdReport check_psd(const DiscreteKernel& W);

/// ||W||_inf of the (possibly periodized) kernel.
double kernel_sup_norm(const PairKernel& pair, const Mesh& mesh, KernelExtension extension);

struct CStarReport {
  double c_star = 0.0;
  double threshold = 0.0;
  bool small_enough = true;
};

/// c* = max_j sum_i ||W_ij||_inf ||u_i^0||_L1, compared with
/// kappa (1 - alpha)^2 / (4 (alpha (1 - alpha) + 1)).
CStarReport c_star(const KernelSpec& spec, const Mesh& mesh, std::span<const Field> u0,
                   double kappa, double alpha);

double small_mass_threshold(double kappa, double alpha);

}  // namespace sgfv
