#include "sgfv/kernel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>

#include <spdlog/spdlog.h>

#include "sgfv/error.hpp"
#include "sgfv/quadrature.hpp"

namespace sgfv {

namespace {

constexpr double kGaussianCutoff = 12.0;  // in units of eps

// Distribution of x - y for x, y uniform on two cells of width h: tent on [-h, h].
double tent_cdf(double y, double h) {
  if (y <= -h) return 0.0;
  if (y >= h) return 1.0;
  if (y <= 0.0) return (y + h) * (y + h) / (2.0 * h * h);
  return 1.0 - (h - y) * (h - y) / (2.0 * h * h);
}

// Average of the 1D profile over a pair of cells whose centers are c apart.
double pair_average_1d(const KernelShape& shape, double c, double h, const QuadratureRule& rule) {
  if (shape.kind == KernelShapeKind::TopHat) {
    const double r = shape.width;
    return tent_cdf(r - c, h) - tent_cdf(-r - c, h);
  }
  double s = 0.0;
  const std::size_t q = rule.nodes.size();
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b)
      s += rule.weights[a] * rule.weights[b] * shape.factor(c + (rule.nodes[a] - rule.nodes[b]) * h);
  return s;
}

double support_radius(const KernelShape& shape) {
  return shape.kind == KernelShapeKind::TopHat ? shape.width : kGaussianCutoff * shape.width;
}

// Per-axis factor table in the layout of OffsetTable along one axis.
std::vector<double> axis_factor(const KernelShape& shape, const Mesh& mesh, int axis,
                                KernelExtension ext, const QuadratureRule& rule) {
  const int m = mesh.cells(axis);
  const double h = mesh.dx(axis);
  const double len = mesh.length(axis);
  const double reach = support_radius(shape) + h;
  if (ext == KernelExtension::WholeSpace) {
    std::vector<double> g(static_cast<std::size_t>(2 * m - 1), 0.0);
    for (int d = 0; d < m; ++d) {
      const double c = d * h;
      const double v = c - h > reach ? 0.0 : pair_average_1d(shape, c, h, rule);
      g[static_cast<std::size_t>(m - 1 + d)] = v;
      g[static_cast<std::size_t>(m - 1 - d)] = v;
    }
    return g;
  }
  std::vector<double> g(static_cast<std::size_t>(m), 0.0);
  for (int d = 0; d <= m / 2; ++d) {
    const double c = d * h;
    const auto n_lo = static_cast<long>(std::floor((-reach - c) / len));
    const auto n_hi = static_cast<long>(std::ceil((reach - c) / len));
    double v = 0.0;
    for (long n = n_lo; n <= n_hi; ++n) {
      const double shifted = c + static_cast<double>(n) * len;
      if (std::abs(shifted) - h > reach) continue;
      v += pair_average_1d(shape, shifted, h, rule);
    }
    g[static_cast<std::size_t>(d)] = v;
    g[static_cast<std::size_t>((m - d) % m)] = v;
  }
  return g;
}

// Offset of padded-grid index n along an axis with M cells; false for the
// zero slot of a whole-space embedding.
bool padded_offset(int n, int m, KernelExtension ext, int& delta) {
  if (ext == KernelExtension::PeriodicWrap) {
    delta = n;
    return true;
  }
  if (n < m) {
    delta = n;
    return true;
  }
  if (n == m) return false;
  delta = n - 2 * m;
  return true;
}

std::vector<int> padded_dims(const Mesh& mesh, KernelExtension ext) {
  std::vector<int> dims(static_cast<std::size_t>(mesh.dim()));
  for (int a = 0; a < mesh.dim(); ++a)
    dims[a] = ext == KernelExtension::WholeSpace ? 2 * mesh.cells(a) : mesh.cells(a);
  return dims;
}

// Iterate a row-major multi-index over `dims`.
bool advance_index(std::vector<int>& idx, const std::vector<int>& dims) {
  for (int a = static_cast<int>(dims.size()) - 1; a >= 0; --a) {
    if (++idx[a] < dims[a]) return true;
    idx[a] = 0;
  }
  return false;
}

// Fourier symbol of m(K) * w laid out on the (padded) convolution grid.
std::vector<std::complex<double>> symbol_of(const Mesh& mesh, const OffsetTable& w,
                                            const std::vector<int>& dims, bool use_fft,
                                            const FftNd* plan) {
  std::size_t total = 1;
  for (int n : dims) total *= static_cast<std::size_t>(n);
  std::vector<std::complex<double>> data(total, 0.0);
  std::vector<int> idx(dims.size(), 0), delta(dims.size(), 0);
  const double m = mesh.cell_measure();
  std::size_t pos = 0;
  do {
    bool keep = true;
    for (std::size_t a = 0; a < dims.size() && keep; ++a)
      keep = padded_offset(idx[a], mesh.cells(static_cast<int>(a)), w.extension(), delta[a]);
    if (keep) data[pos] = m * w.at(delta);
    ++pos;
  } while (advance_index(idx, dims));
  if (use_fft)
    plan->forward(data);
  else
    dft_nd(dims, data, false);
  return data;
}

Field direct_convolve(const Mesh& mesh, const OffsetTable& w, std::span<const double> f) {
  const std::size_t n = mesh.num_cells();
  const int d = mesh.dim();
  std::vector<std::vector<int>> multi(n);
  for (CellIndex k = 0; k < n; ++k) multi[k] = mesh.multi_index(k);
  Field g(n, 0.0);
  std::vector<int> delta(static_cast<std::size_t>(d));
  const double m = mesh.cell_measure();
  for (CellIndex k = 0; k < n; ++k) {
    double s = 0.0;
    for (CellIndex j = 0; j < n; ++j) {
      if (f[j] == 0.0) continue;
      for (int a = 0; a < d; ++a) delta[a] = multi[k][a] - multi[j][a];
      s += w.at(delta) * f[j];
    }
    g[k] = m * s;
  }
  return g;
}

std::vector<std::complex<double>> embed_field(const Mesh& mesh, std::span<const double> f,
                                              const std::vector<int>& dims) {
  std::size_t total = 1;
  for (int n : dims) total *= static_cast<std::size_t>(n);
  std::vector<std::complex<double>> data(total, 0.0);
  if (total == f.size()) {
    for (std::size_t k = 0; k < total; ++k) data[k] = f[k];
    return data;
  }
  std::vector<int> multi;
  for (CellIndex k = 0; k < mesh.num_cells(); ++k) {
    multi = mesh.multi_index(k);
    std::size_t pos = 0;
    for (std::size_t a = 0; a < dims.size(); ++a)
      pos = pos * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(multi[a]);
    data[pos] = f[k];
  }
  return data;
}

Field extract_field(const Mesh& mesh, std::span<const std::complex<double>> data,
                    const std::vector<int>& dims) {
  Field out(mesh.num_cells());
  if (data.size() == out.size()) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = data[k].real();
    return out;
  }
  std::vector<int> multi;
  for (CellIndex k = 0; k < mesh.num_cells(); ++k) {
    multi = mesh.multi_index(k);
    std::size_t pos = 0;
    for (std::size_t a = 0; a < dims.size(); ++a)
      pos = pos * static_cast<std::size_t>(dims[a]) + static_cast<std::size_t>(multi[a]);
    out[k] = data[pos].real();
  }
  return out;
}

void check_fields(const Mesh& mesh, std::span<const Field> u, int species) {
  if (static_cast<int>(u.size()) != species)
    throw UsageError("kernel: expected " + std::to_string(species) + " species fields");
  for (const auto& f : u)
    if (f.size() != mesh.num_cells()) throw UsageError("kernel: field size does not match mesh");
}

}  // namespace

double KernelShape::amplitude() const {
  if (kind == KernelShapeKind::TopHat) return 1.0 / (2.0 * width);
  return 1.0 / std::sqrt(2.0 * std::numbers::pi * width * width);
}

double KernelShape::factor(double z) const {
  if (kind == KernelShapeKind::TopHat) return std::abs(z) <= width ? 1.0 : 0.0;
  return std::exp(-z * z / (2.0 * width * width));
}

double KernelShape::value(std::span<const double> z) const {
  double v = amplitude();
  for (double c : z) v *= factor(c);
  return v;
}

std::string_view KernelShape::name() const noexcept {
  return kind == KernelShapeKind::TopHat ? "tophat" : "gaussian";
}

KernelExtension parse_extension(std::string_view name) {
  if (name == "whole_space") return KernelExtension::WholeSpace;
  if (name == "periodic") return KernelExtension::PeriodicWrap;
  throw ConfigError("unknown kernel extension '" + std::string(name) + "'");
}

std::string_view extension_name(KernelExtension ext) noexcept {
  return ext == KernelExtension::WholeSpace ? "whole_space" : "periodic";
}

ConvolutionBackend parse_backend(std::string_view name) {
  if (name == "on" || name == "fast") return ConvolutionBackend::Fast;
  if (name == "off" || name == "direct") return ConvolutionBackend::Direct;
  if (name == "auto") return ConvolutionBackend::Auto;
  throw ConfigError("unknown convolution backend '" + std::string(name) + "'");
}

const PairKernel& KernelSpec::pair(int i, int j) const {
  if (i < 0 || j < 0 || i >= species || j >= species) throw UsageError("kernel: species index out of range");
  return pairs.at(static_cast<std::size_t>(i * species + j));
}

PairKernel& KernelSpec::pair(int i, int j) {
  return const_cast<PairKernel&>(std::as_const(*this).pair(i, j));
}

void KernelSpec::validate() const {
  if (species < 1) throw ConfigError("kernel: species count must be >= 1");
  if (pairs.size() != static_cast<std::size_t>(species * species))
    throw ConfigError("kernel: need species^2 pair entries");
  if (quadrature_order < 1 || quadrature_order > 64)
    throw ConfigError("kernel: quadrature order must be in [1, 64]");
  for (int i = 0; i < species; ++i) {
    for (int j = 0; j < species; ++j) {
      const auto& p = pair(i, j);
      if (!(p.shape.width > 0.0) || !std::isfinite(p.shape.width))
        throw ConfigError("kernel: width must be positive");
      if (!std::isfinite(p.strength)) throw ConfigError("kernel: strength must be finite");
      const auto& q = pair(j, i);
      if (p.strength != q.strength || !(p.shape == q.shape))
        throw ConfigError("kernel: pair (" + std::to_string(i) + "," + std::to_string(j) +
                          ") is not symmetric");
    }
  }
}

KernelSpec KernelSpec::zero(int species) {
  KernelSpec s;
  s.species = species;
  s.pairs.assign(static_cast<std::size_t>(species * species), PairKernel{KernelShape::gaussian(1.0), 0.0});
  return s;
}

KernelSpec KernelSpec::uniform(int species, KernelShape shape, std::vector<double> strengths,
                               KernelExtension extension, int quadrature_order) {
  if (strengths.size() != static_cast<std::size_t>(species * species))
    throw ConfigError("kernel: strength matrix must be species x species");
  KernelSpec s;
  s.species = species;
  s.extension = extension;
  s.quadrature_order = quadrature_order;
  for (double a : strengths) s.pairs.push_back(PairKernel{shape, a});
  return s;
}

OffsetTable::OffsetTable(std::vector<int> cells, KernelExtension extension)
    : extension_(extension), cells_(std::move(cells)) {
  const std::size_t d = cells_.size();
  extent_.resize(d);
  stride_.resize(d);
  std::size_t total = 1;
  for (std::size_t a = d; a-- > 0;) {
    extent_[a] = extension_ == KernelExtension::WholeSpace ? 2 * cells_[a] - 1 : cells_[a];
    stride_[a] = total;
    total *= static_cast<std::size_t>(extent_[a]);
  }
  values_.assign(total, 0.0);
}

std::size_t OffsetTable::slot(std::span<const int> delta) const {
  if (delta.size() != cells_.size()) throw UsageError("offset table: offset has wrong rank");
  std::size_t pos = 0;
  for (std::size_t a = 0; a < cells_.size(); ++a) {
    const int m = cells_[a];
    int i;
    if (extension_ == KernelExtension::PeriodicWrap) {
      i = ((delta[a] % m) + m) % m;
    } else {
      if (delta[a] <= -m || delta[a] >= m) throw UsageError("offset table: offset out of range");
      i = delta[a] + m - 1;
    }
    pos += static_cast<std::size_t>(i) * stride_[a];
  }
  return pos;
}

double OffsetTable::at(std::span<const int> delta) const { return values_[slot(delta)]; }
double& OffsetTable::at(std::span<const int> delta) { return values_[slot(delta)]; }

double OffsetTable::between(const Mesh& mesh, CellIndex k, CellIndex j) const {
  std::vector<int> delta(cells_.size());
  for (int a = 0; a < mesh.dim(); ++a) delta[a] = mesh.axis_index(k, a) - mesh.axis_index(j, a);
  return at(delta);
}

bool OffsetTable::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

bool fast_path_available(const Mesh& mesh) noexcept {
  for (int a = 0; a < mesh.dim(); ++a)
    if (!is_power_of_two(static_cast<std::size_t>(mesh.cells(a)))) return false;
  return true;
}

ConvolutionBackend resolve_backend(const Mesh& mesh, ConvolutionBackend requested) {
  const bool fast = fast_path_available(mesh);
  switch (requested) {
    case ConvolutionBackend::Direct:
      return ConvolutionBackend::Direct;
    case ConvolutionBackend::Auto:
      return fast ? ConvolutionBackend::Fast : ConvolutionBackend::Direct;
    case ConvolutionBackend::Fast:
      if (fast) return ConvolutionBackend::Fast;
      spdlog::info("fast convolution needs power-of-two cell counts; using the direct sum");
      return ConvolutionBackend::Direct;
  }
  return ConvolutionBackend::Direct;
}

Field convolve(const Mesh& mesh, const OffsetTable& w, std::span<const double> f,
               ConvolutionBackend backend) {
  if (f.size() != mesh.num_cells()) throw UsageError("convolve: field size does not match mesh");
  if (w.cells() != mesh.spec().cells) throw UsageError("convolve: offset table does not match mesh");
  if (resolve_backend(mesh, backend) == ConvolutionBackend::Direct) return direct_convolve(mesh, w, f);
  const auto dims = padded_dims(mesh, w.extension());
  FftNd plan(dims);
  const auto sym = symbol_of(mesh, w, dims, true, &plan);
  auto data = embed_field(mesh, f, dims);
  plan.forward(data);
  for (std::size_t k = 0; k < data.size(); ++k) data[k] *= sym[k];
  plan.inverse(data);
  return extract_field(mesh, data, dims);
}

struct DiscreteKernel::Spectral {
  std::vector<int> dims;
  FftNd plan;
  std::vector<std::vector<std::complex<double>>> symbols;
};

DiscreteKernel::DiscreteKernel(const Mesh& mesh, int species, KernelExtension extension,
                               std::vector<OffsetTable> tables, ConvolutionBackend backend)
    : mesh_(mesh),
      species_(species),
      extension_(extension),
      backend_(resolve_backend(mesh, backend)),
      tables_(std::move(tables)) {
  if (species_ < 1 || tables_.size() != static_cast<std::size_t>(species_ * species_))
    throw UsageError("discrete kernel: need species^2 tables");
  for (const auto& t : tables_)
    if (t.cells() != mesh_.spec().cells || t.extension() != extension_)
      throw UsageError("discrete kernel: table does not match mesh");
  zero_.resize(tables_.size());
  for (std::size_t p = 0; p < tables_.size(); ++p) zero_[p] = tables_[p].is_zero();
  if (backend_ == ConvolutionBackend::Fast && !is_zero()) {
    auto dims = padded_dims(mesh_, extension_);
    auto spectral = std::make_shared<Spectral>(Spectral{dims, FftNd(dims), {}});
    spectral->symbols.resize(tables_.size());
    for (std::size_t p = 0; p < tables_.size(); ++p)
      if (!zero_[p]) spectral->symbols[p] = symbol_of(mesh_, tables_[p], dims, true, &spectral->plan);
    spectral_ = std::move(spectral);
  }
}

const OffsetTable& DiscreteKernel::table(int i, int j) const {
  if (i < 0 || j < 0 || i >= species_ || j >= species_) throw UsageError("kernel: species index out of range");
  return tables_[static_cast<std::size_t>(i * species_ + j)];
}

bool DiscreteKernel::is_zero() const noexcept {
  return std::all_of(zero_.begin(), zero_.end(), [](bool z) { return z; });
}

Field DiscreteKernel::apply(int i, int j, std::span<const double> f) const {
  const auto& w = table(i, j);
  if (f.size() != mesh_.num_cells()) throw UsageError("kernel: field size does not match mesh");
  const auto p = static_cast<std::size_t>(i * species_ + j);
  if (zero_[p]) return Field(mesh_.num_cells(), 0.0);
  if (!spectral_) return direct_convolve(mesh_, w, f);
  auto data = embed_field(mesh_, f, spectral_->dims);
  spectral_->plan.forward(data);
  const auto& sym = spectral_->symbols[p];
  for (std::size_t k = 0; k < data.size(); ++k) data[k] *= sym[k];
  spectral_->plan.inverse(data);
  return extract_field(mesh_, data, spectral_->dims);
}

std::vector<Field> DiscreteKernel::potential(std::span<const Field> u) const {
  check_fields(mesh_, u, species_);
  const auto n = static_cast<std::size_t>(species_);
  std::vector<Field> p(n, Field(mesh_.num_cells(), 0.0));
  if (is_zero()) return p;
  if (!spectral_) {
    for (int i = 0; i < species_; ++i)
      for (int j = 0; j < species_; ++j) {
        if (zero_[static_cast<std::size_t>(i * species_ + j)]) continue;
        const Field g = direct_convolve(mesh_, table(i, j), u[j]);
        for (std::size_t k = 0; k < g.size(); ++k) p[i][k] += g[k];
      }
    return p;
  }
  std::vector<std::vector<std::complex<double>>> hat(n);
  for (std::size_t j = 0; j < n; ++j) {
    hat[j] = embed_field(mesh_, u[j], spectral_->dims);
    spectral_->plan.forward(hat[j]);
  }
  std::vector<std::complex<double>> acc;
  for (std::size_t i = 0; i < n; ++i) {
    acc.assign(hat[0].size(), 0.0);
    bool any = false;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t pidx = i * n + j;
      if (zero_[pidx]) continue;
      any = true;
      const auto& sym = spectral_->symbols[pidx];
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += sym[k] * hat[j][k];
    }
    if (!any) continue;
    spectral_->plan.inverse(acc);
    p[i] = extract_field(mesh_, acc, spectral_->dims);
  }
  return p;
}

DiscreteKernel discretize(const KernelSpec& spec, const Mesh& mesh, ConvolutionBackend backend) {
  spec.validate();
  const auto rule = gauss_legendre(spec.quadrature_order);
  const int n = spec.species;
  const int d = mesh.dim();
  std::vector<OffsetTable> tables;
  tables.reserve(static_cast<std::size_t>(n * n));
  std::vector<std::pair<KernelShape, std::vector<std::vector<double>>>> cache;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const auto& pk = spec.pair(i, j);
      OffsetTable t(mesh.spec().cells, spec.extension);
      if (pk.strength != 0.0) {
        auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& c) { return c.first == pk.shape; });
        if (it == cache.end()) {
          std::vector<std::vector<double>> factors;
          for (int a = 0; a < d; ++a) factors.push_back(axis_factor(pk.shape, mesh, a, spec.extension, rule));
          cache.emplace_back(pk.shape, std::move(factors));
          it = std::prev(cache.end());
        }
        const auto& factors = it->second;
        const double amp = pk.strength * pk.shape.amplitude();
        std::vector<int> idx(static_cast<std::size_t>(d), 0);
        auto values = t.values();
        std::size_t pos = 0;
        do {
          double v = amp;
          for (int a = 0; a < d; ++a) v *= factors[a][static_cast<std::size_t>(idx[a])];
          values[pos++] = v;
        } while (advance_index(idx, t.extent()));
      }
      tables.push_back(std::move(t));
    }
  }
  return DiscreteKernel(mesh, n, spec.extension, std::move(tables), backend);
}

OffsetTable average_kernel(const std::function<double(std::span<const double>)>& W, const Mesh& mesh,
                           KernelExtension extension, int quadrature_order) {
  const auto rule = gauss_legendre(quadrature_order);
  const int d = mesh.dim();
  const auto q = rule.nodes.size();
  OffsetTable t(mesh.spec().cells, extension);
  std::vector<int> idx(static_cast<std::size_t>(d), 0), delta(static_cast<std::size_t>(d));
  std::size_t points = 1;
  for (int a = 0; a < 2 * d; ++a) points *= q;
  std::vector<double> z(static_cast<std::size_t>(d));
  std::vector<std::size_t> qi(static_cast<std::size_t>(2 * d));
  auto values = t.values();
  std::size_t pos = 0;
  do {
    for (int a = 0; a < d; ++a)
      delta[a] = extension == KernelExtension::WholeSpace ? idx[a] - (mesh.cells(a) - 1) : idx[a];
    double s = 0.0;
    for (std::size_t p = 0; p < points; ++p) {
      std::size_t r = p;
      double weight = 1.0;
      for (int a = 0; a < 2 * d; ++a) {
        qi[a] = r % q;
        r /= q;
        weight *= rule.weights[qi[a]];
      }
      for (int a = 0; a < d; ++a) {
        const double h = mesh.dx(a);
        double diff = (delta[a] + rule.nodes[qi[a]] - rule.nodes[qi[d + a]]) * h;
        if (extension == KernelExtension::PeriodicWrap) {
          const double len = mesh.length(a);
          diff -= len * std::round(diff / len);
        }
        z[a] = diff;
      }
      s += weight * W(z);
    }
    values[pos++] = s;
  } while (advance_index(idx, t.extent()));
  return t;
}

std::vector<Field> potential_implicit(const DiscreteKernel& W, std::span<const Field> u) {
  return W.potential(u);
}

std::vector<Field> potential_midpoint(const DiscreteKernel& W, std::span<const Field> u_curr,
                                      std::span<const Field> u_prev) {
  check_fields(W.mesh(), u_curr, W.species());
  check_fields(W.mesh(), u_prev, W.species());
  std::vector<Field> avg(u_curr.begin(), u_curr.end());
  for (std::size_t i = 0; i < avg.size(); ++i)
    for (std::size_t k = 0; k < avg[i].size(); ++k) avg[i][k] = 0.5 * (u_curr[i][k] + u_prev[i][k]);
  return W.potential(avg);
}

PsdReport check_psd(const DiscreteKernel& W) {
  const Mesh& mesh = W.mesh();
  const int n = W.species();
  PsdReport report;
  if (W.is_zero()) return report;
  const std::size_t cells = mesh.num_cells();

  auto verdict = [&](double min_eig, double max_abs) {
    report.min_eigenvalue = min_eig;
    report.is_psd = min_eig >= -1e-12 * std::max(max_abs, 1e-300);
  };

  if (W.extension() == KernelExtension::WholeSpace && static_cast<std::size_t>(n) * cells <= 1024) {
    const auto dim = static_cast<Eigen::Index>(static_cast<std::size_t>(n) * cells);
    Eigen::MatrixXd Q(dim, dim);
    const double m = mesh.cell_measure();
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (CellIndex k = 0; k < cells; ++k)
          for (CellIndex l = 0; l < cells; ++l)
            Q(static_cast<Eigen::Index>(i * cells + k), static_cast<Eigen::Index>(j * cells + l)) =
                m * W.table(i, j).between(mesh, k, l);
    const Eigen::MatrixXd S = 0.5 * (Q + Q.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S, Eigen::EigenvaluesOnly);
    const auto& ev = es.eigenvalues();
    verdict(ev.minCoeff(), ev.cwiseAbs().maxCoeff());
    return report;
  }

  report.exact = W.extension() == KernelExtension::PeriodicWrap;
  const auto dims = padded_dims(mesh, W.extension());
  const bool pow2 = fast_path_available(mesh);
  std::optional<FftNd> plan;
  if (pow2) plan.emplace(dims);
  std::vector<std::vector<std::complex<double>>> sym(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      sym[static_cast<std::size_t>(i * n + j)] = symbol_of(mesh, W.table(i, j), dims, pow2, plan ? &*plan : nullptr);
  const std::size_t freqs = sym[0].size();
  double min_eig = std::numeric_limits<double>::infinity();
  double max_abs = 0.0;
  Eigen::MatrixXcd A(n, n);
  for (std::size_t f = 0; f < freqs; ++f) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) A(i, j) = sym[static_cast<std::size_t>(i * n + j)][f];
    const Eigen::MatrixXcd H = 0.5 * (A + A.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    max_abs = std::max(max_abs, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  verdict(min_eig, max_abs);
  return report;
}

double kernel_sup_norm(const PairKernel& pair, const Mesh& mesh, KernelExtension extension) {
  double v = std::abs(pair.strength) * pair.shape.amplitude();
  if (extension == KernelExtension::WholeSpace || v == 0.0) return v;
  for (int a = 0; a < mesh.dim(); ++a) {
    const double len = mesh.length(a);
    if (pair.shape.kind == KernelShapeKind::TopHat) {
      v *= std::max(1.0, std::ceil(2.0 * pair.shape.width / len));
    } else {
      const double eps = pair.shape.width;
      double s = 1.0;
      for (long k = 1; k * len <= kGaussianCutoff * eps; ++k) {
        const double z = static_cast<double>(k) * len;
        s += 2.0 * std::exp(-z * z / (2.0 * eps * eps));
      }
      v *= s;
    }
  }
  return v;
}

double small_mass_threshold(double kappa, double alpha) {
  return kappa * (1.0 - alpha) * (1.0 - alpha) / (4.0 * (alpha * (1.0 - alpha) + 1.0));
}

CStarReport c_star(const KernelSpec& spec, const Mesh& mesh, std::span<const Field> u0, double kappa,
                   double alpha) {
  spec.validate();
  check_fields(mesh, u0, spec.species);
  std::vector<double> l1(u0.size(), 0.0);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    double s = 0.0;
    for (double v : u0[i]) s += std::abs(v);
    l1[i] = s * mesh.cell_measure();
  }
  CStarReport r;
  for (int j = 0; j < spec.species; ++j) {
    double s = 0.0;
    for (int i = 0; i < spec.species; ++i) s += kernel_sup_norm(spec.pair(i, j), mesh, spec.extension) * l1[i];
    r.c_star = std::max(r.c_star, s);
  }
  r.threshold = small_mass_threshold(kappa, alpha);
  r.small_enough = r.c_star <= r.threshold;
  return r;
}

}  // namespace sgfv
