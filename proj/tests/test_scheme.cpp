#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "sgfv/error.hpp"
#include "sgfv/scheme.hpp"

using namespace sgfv;

namespace {

SchemeConfig config(double kappa, double dt, WeightVariant w = WeightVariant::Bernoulli) {
  SchemeConfig c;
  c.kappa = kappa;
  c.dt = dt;
  c.weight = {w};
  return c;
}

}  // namespace

TEST(Flux, ConstantFieldsCarryNoFlux) {
  Mesh mesh(MeshSpec::uniform(2, 0.0, 1.0, 4));
  Field u(16, 0.4), p(16, -1.3);
  for (const auto& e : mesh.edges()) EXPECT_EQ(edge_flux(u, p, mesh, e, config(0.1, 0.1)), 0.0);
}

TEST(Flux, PureDiffusion) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 8));
  Field u(8, 1.0), p(8, 0.0);
  u[3] = 1.5;
  const EdgeId e{2, 3, 0};
  EXPECT_DOUBLE_EQ(edge_flux(u, p, mesh, e, config(0.2, 0.1)), -8.0 * 0.2 * 0.5);
}

TEST(Flux, BernoulliEqualsClassicalScharfetterGummel) {
  std::mt19937_64 rng(31);
  Mesh mesh(MeshSpec::uniform(2, 0.0, 1.0, 16));
  for (double kappa : {1.0, 0.1, 0.01}) {
    const auto u = oracle::random_field(rng, mesh.num_cells(), 0.01, 2.0);
    const auto p = oracle::random_field(rng, mesh.num_cells(), -0.5, 0.5);
    const auto cfg = config(kappa, 0.1);
    for (const auto& e : mesh.edges()) {
      const double f = edge_flux(u, p, mesh, e, cfg);
      const double ref = oracle::classical_sg_flux(u[e.owner], u[e.neighbor], p[e.owner], p[e.neighbor],
                                                   mesh.transmissibility(e.axis), kappa);
      EXPECT_LE(std::abs(f - ref), 1e-12 * std::max(std::abs(ref), 1e-300) + 1e-300) << kappa;
    }
  }
}

TEST(Flux, UpwindTieBreakTakesNeighbor) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 4));
  Field u = {1.0, 3.0, 1.0, 1.0}, p(4, 0.0);
  const auto cfg = config(0.5, 0.1, WeightVariant::Upwind);
  EXPECT_DOUBLE_EQ(edge_flux(u, p, mesh, {0, 1, 0}, cfg), -4.0 * 0.5 * 2.0);
  EXPECT_THROW(edge_flux(Field{1.0, NAN, 1.0, 1.0}, p, mesh, {0, 1, 0}, cfg), NumericalStateError);
}

TEST(Assemble, HandComputedTwoCellSystem) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 2));
  const Field u_prev = {0.3, 0.7};
  const Field p = {0.0, 0.3};
  const auto sys = assemble(u_prev, p, config(0.1, 0.25, WeightVariant::Upwind), mesh);
  const auto A = sys.A.to_dense();
  EXPECT_NEAR(A[0], 2.4, 1e-15);
  EXPECT_NEAR(A[1], -1.6, 1e-15);
  EXPECT_NEAR(A[2], -0.4, 1e-15);
  EXPECT_NEAR(A[3], 3.6, 1e-15);
  EXPECT_NEAR(sys.S[0], 0.6, 1e-15);
  EXPECT_NEAR(sys.S[1], 1.4, 1e-15);

  const double b = 0.1 * 3.0 / std::expm1(3.0);
  const auto B = assemble(u_prev, p, config(0.1, 0.25), mesh).A.to_dense();
  EXPECT_NEAR(B[0], 2.0 + 4.0 * b, 1e-14);
  EXPECT_NEAR(B[1], -4.0 * (b + 0.3), 1e-14);
  EXPECT_NEAR(B[2], -4.0 * b, 1e-14);
  EXPECT_NEAR(B[3], 2.0 + 4.0 * (b + 0.3), 1e-14);
}

TEST(Assemble, MMatrixStructureAndColumnSums) {
  std::mt19937_64 rng(32);
  for (const auto& spec : {MeshSpec::uniform(1, -8.0, 8.0, 64), MeshSpec{{0.0, 0.0}, {1.0, 2.0}, {8, 16}},
                           MeshSpec::uniform(3, 0.0, 1.0, 4)}) {
    Mesh mesh(spec);
    const auto u = oracle::random_field(rng, mesh.num_cells(), 0.0, 1.0);
    const auto p = oracle::random_field(rng, mesh.num_cells(), -3.0, 3.0);
    for (auto w : {WeightVariant::Bernoulli, WeightVariant::Sigmoid, WeightVariant::Upwind}) {
      const auto cfg = config(0.05, 0.01, w);
      const auto sys = assemble(u, p, cfg, mesh);
      for (double v : sys.A.diag) EXPECT_GT(v, 0.0);
      for (double v : sys.A.off) EXPECT_LE(v, 0.0);
      const double target = mesh.cell_measure() / cfg.dt;
      for (double c : sys.A.column_sums()) EXPECT_LE(std::abs(c - target), 1e-13 * target);
    }
  }
}

TEST(Assemble, ConstantPotentialKeepsConstants) {
  Mesh mesh(MeshSpec::uniform(2, 0.0, 1.0, 8));
  const Field u(64, 0.25);
  const auto sys = assemble(u, Field(64, 4.0), config(0.3, 0.1), mesh);
  const auto v = solve_linear(sys, {});
  for (double x : v) EXPECT_NEAR(x, 0.25, 1e-14);
}

TEST(Assemble, PreconditionViolations) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 4));
  EXPECT_THROW(assemble(Field(4, 0.0), Field(4, 0.0), config(0.1, 0.1), mesh), ConfigError);
  EXPECT_THROW(assemble(Field(3, 1.0), Field(4, 0.0), config(0.1, 0.1), mesh), UsageError);
}

TEST(Flux, ZeroDiffusionLimitIsUpwind) {
  std::mt19937_64 rng(33);
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 64));
  const auto u = oracle::random_field(rng, 64, 0.1, 1.0);
  const auto p = oracle::random_field(rng, 64, -0.05, 0.05);
  for (auto w : {WeightVariant::Upwind, WeightVariant::Bernoulli, WeightVariant::Sigmoid, WeightVariant::GeometricMean}) {
    std::vector<double> err;
    for (double kappa : {1e-2, 1e-3, 1e-4}) {
      double e = 0.0;
      for (const auto& edge : mesh.edges()) {
        const double dp = p[edge.neighbor] - p[edge.owner];
        const double uh = dp >= 0.0 ? u[edge.neighbor] : u[edge.owner];
        const double upwind = -mesh.transmissibility(0) * uh * dp;
        e = std::max(e, std::abs(edge_flux(u, p, mesh, edge, config(kappa, 0.1, w)) - upwind));
      }
      err.push_back(e);
    }
    for (std::size_t k = 0; k < err.size(); ++k) EXPECT_LE(err[k], 64.0 * 1.0 * std::pow(10.0, -2.0 - k) * 1.0001);
    if (err.back() > 0.0) {
      EXPECT_GE(std::log(err.front() / err.back()) / std::log(100.0), 0.9);
    }
  }
}

TEST(Advance, ZeroKernelConvergesInTwoIterations) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 32));
  auto W = discretize(KernelSpec::zero(2), mesh);
  State s;
  s.u = {Field(32, 0.5), Field(32, 0.5)};
  for (int k = 0; k < 8; ++k) s.u[0][k] = 2.0;
  const auto out = advance(s, W, config(0.1, 0.01));
  EXPECT_EQ(out.stats.picard_iters, 2);
  EXPECT_EQ(out.stats.picard_errors.back(), 0.0);
  EXPECT_EQ(out.state.step, 1u);
  ASSERT_EQ(out.state.p.size(), 2u);
  for (double v : out.state.p[0]) EXPECT_EQ(v, 0.0);
}

TEST(Advance, ConservesMassAndPositivityWithGaussianRepulsion) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 64));
  auto W = discretize(KernelSpec::uniform(2, KernelShape::gaussian(1.0), {1e-3, 1e-3, 1e-3, 1e-3},
                                          KernelExtension::WholeSpace),
                      mesh);
  State s;
  s.u = {Field(64), Field(64)};
  for (CellIndex k = 0; k < 64; ++k) {
    const double x = mesh.center(k, 0);
    s.u[0][k] = std::sin(2.0 * M_PI * x) + 0.5;
    s.u[1][k] = 0.1 * std::cos(2.0 * M_PI * x) + 0.05;
  }
  const auto cfg = config(0.01, 0.1 / 64);
  const auto out = advance(s, W, cfg);
  for (int i = 0; i < 2; ++i) {
    const double m0 = integrate(mesh, s.u[i]), m1 = integrate(mesh, out.state.u[i]);
    EXPECT_LE(std::abs(m1 - m0), 1e-12 * std::abs(m0));
  }
}

TEST(Advance, ConvergedStepSatisfiesSchemeEquations) {
  Mesh mesh(MeshSpec::uniform(1, -4.0, 4.0, 64));
  auto W = discretize(KernelSpec::uniform(2, KernelShape::gaussian(1.0), {10.0, 5.0, 5.0, 3.0},
                                          KernelExtension::PeriodicWrap),
                      mesh);
  std::mt19937_64 rng(34);
  State s;
  s.u = {oracle::random_field(rng, 64, 0.1, 1.0), oracle::random_field(rng, 64, 0.1, 1.0)};
  for (auto coupling : {Coupling::Implicit, Coupling::Midpoint}) {
    auto cfg = config(0.1, 0.01);
    cfg.coupling = coupling;
    const auto out = advance(s, W, cfg);
    EXPECT_LE(out.stats.picard_errors.back(), cfg.picard_tol);
    for (int i = 0; i < 2; ++i) {
      for (double v : out.state.u[i]) EXPECT_GT(v, 0.0);
      const double scale = mesh.cell_measure() / cfg.dt * oracle::max_abs(s.u[i]);
      EXPECT_LE(scheme_residual(s.u[i], out.state.u[i], out.state.p[i], cfg, mesh),
                10.0 * (cfg.picard_tol / cfg.dt + cfg.linear.rel_tol) * scale);
    }
  }
}

TEST(Advance, IterationBudgetExhaustionIsAStepFailure) {
  Mesh mesh(MeshSpec::uniform(1, -4.0, 4.0, 32));
  auto W = discretize(KernelSpec::uniform(1, KernelShape::gaussian(1.0), {5.0}, KernelExtension::PeriodicWrap), mesh);
  State s;
  s.u = {Field(32, 0.1)};
  s.u[0][4] = 3.0;
  auto cfg = config(0.1, 0.1);
  cfg.picard_max_iter = 1;
  try {
    advance(s, W, cfg);
    FAIL() << "expected StepFailure";
  } catch (const StepFailure& e) {
    EXPECT_EQ(e.step(), 1u);
    EXPECT_EQ(e.picard_errors().size(), 1u);
  }
}

TEST(Run, ZeroStepsReturnsInitialState) {
  Mesh mesh(MeshSpec::uniform(1, 0.0, 1.0, 8));
  auto W = discretize(KernelSpec::zero(1), mesh);
  State s;
  s.u = {Field(8, 1.0)};
  auto cfg = config(0.1, 0.1);
  cfg.T = 0.0;
  const auto r = run(cfg, s, W);
  EXPECT_EQ(r.final_state.u, s.u);
  EXPECT_TRUE(r.steps.empty());
}

TEST(Run, PureDiffusionApproachesMeanMonotonically) {
  Mesh mesh(MeshSpec::uniform(1, -1.0, 1.0, 64));
  auto W = discretize(KernelSpec::zero(1), mesh);
  State s;
  s.u = {Field(64, 0.0)};
  for (int k = 24; k < 40; ++k) s.u[0][k] = 1.0;
  const double mean = integrate(mesh, s.u[0]) / 2.0;
  auto cfg = config(0.05, 0.02);
  cfg.T = 1.0;
  std::vector<double> dist;
  StepObserver obs = [&](const State&, const State& curr, const StepStats&) {
    double d = 0.0;
    for (double v : curr.u[0]) d = std::max(d, std::abs(v - mean));
    dist.push_back(d);
  };
  const auto r = run(cfg, s, W, std::span<const StepObserver>(&obs, 1));
  ASSERT_EQ(dist.size(), 50u);
  for (std::size_t k = 1; k < dist.size(); ++k) EXPECT_LT(dist[k], dist[k - 1]);
  EXPECT_EQ(r.final_state.step, 50u);
}

TEST(SchemeConfig, Validation) {
  auto c = config(0.1, 0.1);
  c.T = 1.0;
  EXPECT_EQ(c.num_steps(), 10u);
  c.T = 1.05;
  EXPECT_THROW(c.num_steps(), ConfigError);
  c.kappa = 0.0;
  EXPECT_THROW(c.validate(), ConfigError);
  EXPECT_THROW(parse_coupling("explicit"), ConfigError);
}
