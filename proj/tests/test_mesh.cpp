#include <gtest/gtest.h>

#include <set>

#include "sgfv/error.hpp"
#include "sgfv/mesh.hpp"

using namespace sgfv;

TEST(Mesh, OneDimensionalGeometry) {
  Mesh m(MeshSpec::uniform(1, 0.0, 1.0, 4));
  EXPECT_DOUBLE_EQ(m.dx(0), 0.25);
  EXPECT_DOUBLE_EQ(m.cell_measure(), 0.25);
  EXPECT_DOUBLE_EQ(m.edge_measure(0), 1.0);
  EXPECT_DOUBLE_EQ(m.transmissibility(0), 4.0);
  EXPECT_EQ(m.num_edges(), 4u);
}

TEST(Mesh, AnisotropicTwoDimensional) {
  Mesh m(MeshSpec{{0.0, 0.0}, {1.0, 1.0}, {2, 4}});
  EXPECT_DOUBLE_EQ(m.cell_measure(), 0.125);
  EXPECT_DOUBLE_EQ(m.transmissibility(0), 0.5);
  EXPECT_DOUBLE_EQ(m.transmissibility(1), 2.0);
  EXPECT_DOUBLE_EQ(m.h(), 0.5);
}

TEST(Mesh, ExperimentDomainMeasure) {
  Mesh m(MeshSpec::uniform(1, -10.0, 10.0, 500));
  EXPECT_NEAR(m.dx(0), 0.04, 1e-15);
  Field one(m.num_cells(), 1.0);
  EXPECT_NEAR(integrate(m, one), 20.0, 1e-12);
  EXPECT_DOUBLE_EQ(m.domain_measure(), 20.0);
}

TEST(Mesh, PeriodicNeighbors) {
  Mesh m1(MeshSpec::uniform(1, 0.0, 1.0, 4));
  EXPECT_EQ(m1.neighbor(3, 0, +1), 0u);
  EXPECT_EQ(m1.neighbor(0, 0, -1), 3u);

  Mesh m2(MeshSpec::uniform(2, 0.0, 1.0, 4));
  const int k[] = {0, 2};
  const int l[] = {0, 3};
  EXPECT_EQ(m2.neighbor(m2.linear_index(k), 1, +1), m2.linear_index(l));
  EXPECT_THROW(m2.neighbor(0, 2, +1), UsageError);
}

TEST(Mesh, EdgeCounts) {
  EXPECT_EQ(Mesh(MeshSpec::uniform(1, 0.0, 1.0, 4)).edges().size(), 4u);
  EXPECT_EQ(Mesh(MeshSpec::uniform(2, 0.0, 1.0, 4)).edges().size(), 32u);
  EXPECT_EQ(Mesh(MeshSpec{{0.0, 0.0}, {1.0, 1.0}, {2, 3}}).edges().size(), 12u);
}

TEST(Mesh, EdgesAreDistinctUnorderedPairsOnLargeAxes) {
  Mesh m(MeshSpec{{0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}, {3, 4, 5}});
  std::set<std::tuple<CellIndex, CellIndex, int>> seen;
  for (const auto& e : m.edges()) {
    EXPECT_EQ(e.neighbor, m.neighbor(e.owner, e.axis, +1));
    EXPECT_TRUE(seen.insert({std::min(e.owner, e.neighbor), std::max(e.owner, e.neighbor), e.axis}).second);
  }
  EXPECT_EQ(seen.size(), 3u * m.num_cells());
}

TEST(Mesh, IndexRoundTrip) {
  Mesh m(MeshSpec{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}, {3, 4, 5}});
  for (CellIndex k = 0; k < m.num_cells(); ++k) {
    const auto multi = m.multi_index(k);
    EXPECT_EQ(m.linear_index(multi), k);
    for (int a = 0; a < 3; ++a) {
      EXPECT_EQ(m.axis_index(k, a), multi[a]);
      EXPECT_EQ(m.neighbor(m.neighbor(k, a, +1), a, -1), k);
    }
  }
  EXPECT_EQ(m.stride(2), 1u);
  EXPECT_EQ(m.stride(0), 20u);
}

TEST(Mesh, CellCenters) {
  Mesh m(MeshSpec::uniform(1, -8.0, 8.0, 16));
  EXPECT_DOUBLE_EQ(m.center(0, 0), -7.5);
  EXPECT_DOUBLE_EQ(m.center(15, 0), 7.5);
}

TEST(Mesh, InvalidSpecsRejected) {
  EXPECT_THROW(Mesh(MeshSpec::uniform(1, 0.0, 1.0, 1)), ConfigError);
  EXPECT_THROW(Mesh(MeshSpec::uniform(1, 1.0, 1.0, 8)), ConfigError);
  EXPECT_THROW(Mesh(MeshSpec{{0.0}, {1.0, 2.0}, {4}}), ConfigError);
  EXPECT_THROW(Mesh(MeshSpec{{}, {}, {}}), ConfigError);
}

TEST(Mesh, SameGeometry) {
  Mesh a(MeshSpec::uniform(2, 0.0, 1.0, 8));
  Mesh b(MeshSpec::uniform(2, 0.0, 1.0, 8));
  Mesh c(MeshSpec::uniform(2, 0.0, 1.0, 16));
  EXPECT_TRUE(a.same_geometry(b));
  EXPECT_FALSE(a.same_geometry(c));
}
