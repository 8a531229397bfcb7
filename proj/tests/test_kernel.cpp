#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "sgfv/error.hpp"
#include "sgfv/fft.hpp"
#include "sgfv/kernel.hpp"
#include "sgfv/quadrature.hpp"

using namespace sgfv;

namespace {

std::vector<std::complex<double>> naive_dft(const std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> y(n);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<long double> s = 0.0L;
    for (std::size_t j = 0; j < n; ++j) {
      const long double ang = sign * 2.0L * std::numbers::pi_v<long double> * static_cast<long double>((j * k) % n) / n;
      s += std::complex<long double>(x[j].real(), x[j].imag()) * std::polar(1.0L, ang);
    }
    y[k] = {static_cast<double>(s.real()), static_cast<double>(s.imag())};
  }
  return y;
}

KernelSpec gaussian_pair(std::vector<double> strengths, KernelExtension ext, double eps = 1.0, int q = 4) {
  const int n = strengths.size() == 1 ? 1 : 2;
  return KernelSpec::uniform(n, KernelShape::gaussian(eps), std::move(strengths), ext, q);
}

}  // namespace

TEST(Quadrature, IntegratesPolynomialsExactly) {
  for (int q : {1, 2, 4, 6, 10}) {
    const auto r = gauss_legendre(q);
    for (int p = 0; p < 2 * q; ++p) {
      long double s = 0.0L;
      for (std::size_t k = 0; k < r.nodes.size(); ++k) s += r.weights[k] * std::pow(r.nodes[k], p);
      EXPECT_NEAR(static_cast<double>(s), 1.0 / (p + 1), 2e-15) << q << " " << p;
    }
  }
  EXPECT_THROW(gauss_legendre(0), ConfigError);
}

TEST(Fft, MatchesNaiveTransform) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  for (std::size_t n : {1u, 2u, 8u, 64u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {d(rng), d(rng)};
    for (bool inv : {false, true}) {
      auto y = x;
      Fft1d(n).transform(y, inv);
      const auto ref = naive_dft(x, inv);
      for (std::size_t k = 0; k < n; ++k) EXPECT_LT(std::abs(y[k] - ref[k]), 1e-12 * n);
    }
  }
}

TEST(Fft, GenericDftHandlesOddSizes) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<std::complex<double>> x(12);
  for (auto& v : x) v = {d(rng), d(rng)};
  auto y = x;
  dft_nd({3, 4}, y, false);
  // Separable oracle: 1D transforms along each axis.
  std::vector<std::complex<double>> ref = x;
  for (int r = 0; r < 3; ++r) {
    std::vector<std::complex<double>> row(ref.begin() + 4 * r, ref.begin() + 4 * r + 4);
    row = naive_dft(row, false);
    std::copy(row.begin(), row.end(), ref.begin() + 4 * r);
  }
  for (int c = 0; c < 4; ++c) {
    std::vector<std::complex<double>> col = {ref[c], ref[4 + c], ref[8 + c]};
    col = naive_dft(col, false);
    for (int r = 0; r < 3; ++r) ref[4 * r + c] = col[r];
  }
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(std::abs(y[k] - ref[k]), 1e-13);
  dft_nd({3, 4}, y, true);
  for (std::size_t k = 0; k < x.size(); ++k) EXPECT_LT(std::abs(y[k] / 12.0 - x[k]), 1e-14);
}

TEST(Kernel, ShapeValues) {
  const auto g = KernelShape::gaussian(0.5);
  const double z[] = {0.3, -0.2};
  const double ref = std::exp(-(0.09 + 0.04) / 0.5) / std::sqrt(2.0 * std::numbers::pi * 0.25);
  EXPECT_NEAR(g.value(z), ref, 1e-15);
  const auto t = KernelShape::tophat(0.35);
  EXPECT_DOUBLE_EQ(t.value(z), 1.0 / 0.7);
  const double out[] = {0.4, 0.0};
  EXPECT_DOUBLE_EQ(t.value(out), 0.0);
}

TEST(Kernel, ConstantKernelAverages) {
  Mesh mesh(MeshSpec::uniform(2, 0.0, 1.0, 4));
  auto t = average_kernel([](std::span<const double>) { return 2.5; }, mesh, KernelExtension::PeriodicWrap, 3);
  for (double v : t.values()) EXPECT_NEAR(v, 2.5, 1e-14);
}

TEST(Kernel, TopHatCoveringTorusIsConstant) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 16));
  auto W = discretize(KernelSpec::uniform(1, KernelShape::tophat(0.5), {1.0}, KernelExtension::PeriodicWrap), mesh);
  for (double v : W.table(0, 0).values()) EXPECT_NEAR(v, 1.0, 1e-14);
}

TEST(Kernel, GaussianWholeSpaceMatchesClosedForm) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 32));
  auto W = discretize(gaussian_pair({1.0}, KernelExtension::WholeSpace, 0.3, 10), mesh, ConvolutionBackend::Direct);
  const double h = mesh.dx(0);
  for (int d = -31; d <= 31; ++d) {
    const int delta[] = {d};
    EXPECT_NEAR(W.table(0, 0).at(delta), oracle::gaussian_pair_average(d * h, h, 0.3), 1e-13) << d;
  }
}

TEST(Kernel, PeriodicTablesSumImages) {
  Mesh mesh(MeshSpec::uniform(1, -1.0, 1.0, 16));
  const double h = mesh.dx(0), len = 2.0;
  auto G = discretize(gaussian_pair({1.0}, KernelExtension::PeriodicWrap, 0.8, 10), mesh);
  auto T = discretize(KernelSpec::uniform(1, KernelShape::tophat(1.3), {1.0}, KernelExtension::PeriodicWrap), mesh);
  for (int d = 0; d < 16; ++d) {
    double g = 0.0, t = 0.0;
    for (int n = -20; n <= 20; ++n) {
      g += oracle::gaussian_pair_average(d * h + n * len, h, 0.8);
      t += oracle::tophat_pair_average(d * h + n * len, h, 1.3);
    }
    const int delta[] = {d};
    EXPECT_NEAR(G.table(0, 0).at(delta), g, 1e-13) << d;
    EXPECT_NEAR(T.table(0, 0).at(delta), t, 1e-14) << d;
  }
}

TEST(Kernel, GaussianQuadratureConvergesWithOrder) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 8));
  const double h = mesh.dx(0);
  double prev = 1.0;
  for (int q : {1, 2, 3, 4}) {
    auto W = discretize(gaussian_pair({1.0}, KernelExtension::WholeSpace, 0.1, q), mesh);
    double err = 0.0;
    for (int d = 0; d < 8; ++d) {
      const int delta[] = {d};
      err = std::max(err, std::abs(W.table(0, 0).at(delta) - oracle::gaussian_pair_average(d * h, h, 0.1)));
    }
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 1e-4);
}

TEST(Kernel, SeparableTablesMatchGenericAverage) {
  Mesh mesh(MeshSpec{{0.0, 0.0}, {1.0, 2.0}, {8, 4}});
  const auto shape = KernelShape::gaussian(0.4);
  auto W = discretize(KernelSpec::uniform(1, shape, {1.5}, KernelExtension::WholeSpace, 6), mesh);
  auto ref = average_kernel([&](std::span<const double> z) { return 1.5 * shape.value(z); }, mesh,
                            KernelExtension::WholeSpace, 6);
  const auto a = W.table(0, 0).values();
  const auto b = ref.values();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-12);
}

TEST(Kernel, IdentityAndRowSumConvolutions) {
  Mesh mesh(MeshSpec::uniform(2, 0.0, 1.0, 8));
  std::mt19937_64 rng(3);
  const auto f = oracle::random_field(rng, mesh.num_cells(), -1.0, 1.0);
  for (auto ext : {KernelExtension::PeriodicWrap, KernelExtension::WholeSpace}) {
    OffsetTable delta(mesh.spec().cells, ext);
    const int zero[] = {0, 0};
    delta.at(zero) = 1.0 / mesh.cell_measure();
    for (auto be : {ConvolutionBackend::Direct, ConvolutionBackend::Fast})
      EXPECT_LT(oracle::max_abs_diff(convolve(mesh, delta, f, be), f), 1e-14);
  }
  auto W = discretize(gaussian_pair({2.0}, KernelExtension::PeriodicWrap, 0.2), mesh);
  double rowsum = 0.0;
  for (double v : W.table(0, 0).values()) rowsum += v;
  const auto g = convolve(mesh, W.table(0, 0), Field(mesh.num_cells(), 1.0));
  for (double v : g) EXPECT_NEAR(v, mesh.cell_measure() * rowsum, 1e-13);
  // The profile keeps its one-dimensional prefactor in every dimension.
  EXPECT_NEAR(mesh.cell_measure() * rowsum, 2.0 * std::sqrt(2.0 * std::numbers::pi) * 0.2, 1e-12);
}

TEST(Kernel, FastMatchesDirectOnRandomInputs) {
  std::mt19937_64 rng(5);
  for (auto ext : {KernelExtension::PeriodicWrap, KernelExtension::WholeSpace}) {
    for (const auto& spec : {MeshSpec::uniform(1, 0.0, 1.0, 64), MeshSpec{{0.0, -1.0}, {1.0, 1.0}, {16, 32}},
                             MeshSpec::uniform(3, 0.0, 1.0, 4)}) {
      Mesh mesh(spec);
      OffsetTable w(spec.cells, ext);
      for (double& v : w.values()) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
      const auto f = oracle::random_field(rng, mesh.num_cells(), -1.0, 1.0);
      const auto a = convolve(mesh, w, f, ConvolutionBackend::Direct);
      const auto b = convolve(mesh, w, f, ConvolutionBackend::Fast);
      EXPECT_LE(oracle::max_abs_diff(a, b), 1e-12 * oracle::max_abs(a));
      EXPECT_LE(oracle::max_abs_diff(a, oracle::brute_convolve(mesh, w, f)), 1e-13 * oracle::max_abs(a));
    }
  }
}

TEST(Kernel, FastRequestFallsBackOnOddMeshes) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 12));
  EXPECT_FALSE(fast_path_available(mesh));
  EXPECT_EQ(resolve_backend(mesh, ConvolutionBackend::Fast), ConvolutionBackend::Direct);
  EXPECT_EQ(resolve_backend(mesh, ConvolutionBackend::Auto), ConvolutionBackend::Direct);
  auto W = discretize(gaussian_pair({1.0}, KernelExtension::PeriodicWrap), mesh, ConvolutionBackend::Fast);
  EXPECT_EQ(W.backend(), ConvolutionBackend::Direct);
}

TEST(Kernel, PotentialExamples) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 2.0, 16));
  auto W = discretize(gaussian_pair({1.0, 0.5, 0.5, 2.0}, KernelExtension::PeriodicWrap, 0.3), mesh);
  // Constants map to constants scaled by the kernel integrals.
  std::vector<Field> c = {Field(16, 0.7), Field(16, 0.2)};
  const auto p = W.potential(c);
  for (int k = 0; k < 16; ++k) {
    EXPECT_NEAR(p[0][k], 1.0 * 0.7 + 0.5 * 0.2, 1e-12);
    EXPECT_NEAR(p[1][k], 0.5 * 0.7 + 2.0 * 0.2, 1e-12);
  }
  // A point mass reproduces the table.
  std::vector<Field> unit = {Field(16, 0.0), Field(16, 0.0)};
  unit[0][5] = 1.0;
  const auto q = W.potential(unit);
  for (CellIndex k = 0; k < 16; ++k) EXPECT_NEAR(q[0][k], mesh.cell_measure() * W.table(0, 0).between(mesh, k, 5), 1e-15);

  const auto zero = discretize(KernelSpec::zero(2), mesh).potential(c);
  for (const auto& f : zero)
    for (double v : f) EXPECT_EQ(v, 0.0);
}

TEST(Kernel, MidpointPotential) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 32));
  auto W = discretize(gaussian_pair({1.0, -0.5, -0.5, 3.0}, KernelExtension::WholeSpace, 0.1), mesh);
  std::mt19937_64 rng(8);
  std::vector<Field> u = {oracle::random_field(rng, 32, 0.0, 1.0), oracle::random_field(rng, 32, 0.0, 1.0)};
  std::vector<Field> zero = {Field(32, 0.0), Field(32, 0.0)};
  const auto full = potential_implicit(W, u);
  const auto same = potential_midpoint(W, u, u);
  const auto half = potential_midpoint(W, u, zero);
  for (int i = 0; i < 2; ++i) {
    EXPECT_LT(oracle::max_abs_diff(full[i], same[i]), 1e-15);
    for (int k = 0; k < 32; ++k) EXPECT_NEAR(half[i][k], 0.5 * full[i][k], 1e-15);
  }
}

TEST(Kernel, PsdVerdicts) {
  Mesh mesh64(MeshSpec::uniform(1, -8.0, 8.0, 64));
  auto G = discretize(gaussian_pair({10.0, 5.0, 5.0, 3.0}, KernelExtension::PeriodicWrap), mesh64);
  EXPECT_TRUE(check_psd(G).is_psd);

  Mesh mesh128(MeshSpec::uniform(1, -10.0, 10.0, 128));
  auto T = discretize(KernelSpec::uniform(1, KernelShape::tophat(1.0), {-1.0}, KernelExtension::PeriodicWrap), mesh128);
  const auto r = check_psd(T);
  EXPECT_FALSE(r.is_psd);
  EXPECT_LT(r.min_eigenvalue, 0.0);

  EXPECT_TRUE(check_psd(discretize(KernelSpec::zero(2), mesh64)).is_psd);
  EXPECT_EQ(check_psd(discretize(KernelSpec::zero(2), mesh64)).min_eigenvalue, 0.0);
}

TEST(Kernel, PsdAgreesWithQuadraticFormOracle) {
  struct Case {
    KernelSpec spec;
    MeshSpec mesh;
  };
  const std::vector<Case> cases = {
      {gaussian_pair({10.0, 5.0, 5.0, 3.0}, KernelExtension::PeriodicWrap), MeshSpec::uniform(1, -8.0, 8.0, 16)},
      {gaussian_pair({10.0, 5.0, 5.0, 3.0}, KernelExtension::WholeSpace), MeshSpec::uniform(1, -8.0, 8.0, 16)},
      {gaussian_pair({1.0, 2.0, 2.0, 1.0}, KernelExtension::PeriodicWrap), MeshSpec::uniform(1, -8.0, 8.0, 16)},
      {KernelSpec::uniform(1, KernelShape::tophat(1.0), {-1.0}, KernelExtension::PeriodicWrap),
       MeshSpec::uniform(1, -10.0, 10.0, 16)},
      {KernelSpec::uniform(1, KernelShape::tophat(1.0), {1.0}, KernelExtension::PeriodicWrap),
       MeshSpec::uniform(1, -10.0, 10.0, 16)},
      {KernelSpec::uniform(1, KernelShape::tophat(0.3), {1.0}, KernelExtension::PeriodicWrap),
       MeshSpec::uniform(2, 0.0, 1.0, 4)},
      {KernelSpec::uniform(2, KernelShape::gaussian(0.2), {1.0, 0.0, 0.0, 1.0}, KernelExtension::WholeSpace),
       MeshSpec::uniform(2, 0.0, 1.0, 4)},
  };
  for (const auto& c : cases) {
    Mesh mesh(c.mesh);
    auto W = discretize(c.spec, mesh);
    const double brute = oracle::quadratic_form_min_eigenvalue(W);
    const auto r = check_psd(W);
    const double scale = oracle::max_abs(W.table(0, 0).values()) * mesh.cell_measure() * mesh.cell_measure();
    const bool brute_psd = brute >= -1e-10 * scale;
    EXPECT_EQ(r.is_psd, brute_psd) << brute << " " << r.min_eigenvalue;
  }
}

TEST(Kernel, WholeSpaceLargeMeshUsesEmbeddingBound) {
  Mesh mesh(MeshSpec::uniform(1, -8.0, 8.0, 2048));
  auto W = discretize(gaussian_pair({1.0}, KernelExtension::WholeSpace), mesh);
  const auto r = check_psd(W);
  EXPECT_FALSE(r.exact);
  EXPECT_TRUE(r.is_psd);
}

TEST(Kernel, CStarExamples) {
  Mesh mesh(MeshSpec::uniform(1, -10.0, 10.0, 64));
  const auto spec = KernelSpec::uniform(1, KernelShape::tophat(1.0), {-1.0}, KernelExtension::PeriodicWrap);
  std::vector<Field> zero = {Field(64, 0.0)};
  EXPECT_EQ(c_star(spec, mesh, zero, 0.01, 0.5).c_star, 0.0);
  std::vector<Field> unit = {Field(64, 1.0 / 20.0)};
  const auto r = c_star(spec, mesh, unit, 0.01, 0.5);
  EXPECT_NEAR(r.c_star, 0.5, 1e-14);
  EXPECT_NEAR(r.threshold, 0.01 * 0.25 / (4.0 * 1.25), 1e-16);
  EXPECT_FALSE(r.small_enough);
}

TEST(Kernel, CStarMixedStrengthsByDefinition) {
  Mesh mesh(MeshSpec::uniform(1, -8.0, 8.0, 32));
  const auto spec = KernelSpec::uniform(2, KernelShape::gaussian(0.5), {-2.0, 1.0, 1.0, 3.0},
                                        KernelExtension::WholeSpace);
  std::vector<Field> u = {Field(32, 0.01), Field(32, 0.03)};
  const double amp = 1.0 / std::sqrt(2.0 * std::numbers::pi * 0.25);
  const double l1_1 = 0.01 * 16.0, l1_2 = 0.03 * 16.0;
  const double col1 = 2.0 * amp * l1_1 + 1.0 * amp * l1_2;
  const double col2 = 1.0 * amp * l1_1 + 3.0 * amp * l1_2;
  EXPECT_NEAR(c_star(spec, mesh, u, 0.01, 0.0).c_star, std::max(col1, col2), 1e-13);
}

TEST(Kernel, SupNormCountsOverlappingImages) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 16));
  const PairKernel wide{KernelShape::tophat(0.75), 1.0};
  EXPECT_NEAR(kernel_sup_norm(wide, mesh, KernelExtension::PeriodicWrap), 2.0 / 1.5, 1e-15);
  const PairKernel g{KernelShape::gaussian(1.0), 1.0};
  double s = 0.0;
  for (int n = -12; n <= 12; ++n) s += std::exp(-0.5 * n * n);
  EXPECT_NEAR(kernel_sup_norm(g, mesh, KernelExtension::PeriodicWrap), s / std::sqrt(2.0 * std::numbers::pi), 1e-14);
}

TEST(Kernel, SpecValidation) {
  auto spec = KernelSpec::uniform(2, KernelShape::gaussian(1.0), {1.0, 2.0, 3.0, 1.0}, KernelExtension::PeriodicWrap);
  EXPECT_THROW(spec.validate(), ConfigError);
  EXPECT_THROW(KernelSpec::uniform(1, KernelShape::tophat(-1.0), {1.0}, KernelExtension::PeriodicWrap).validate(),
               ConfigError);
  EXPECT_THROW(parse_extension("mirror"), ConfigError);
  EXPECT_EQ(parse_backend("off"), ConvolutionBackend::Direct);
  EXPECT_EQ(parse_backend("on"), ConvolutionBackend::Fast);
  EXPECT_EQ(parse_backend("auto"), ConvolutionBackend::Auto);
}
