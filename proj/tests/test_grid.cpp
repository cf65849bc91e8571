#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "degenflow/grid.hpp"

using namespace degenflow;

namespace {

std::shared_ptr<const Grid> make(Grid g) { return std::make_shared<const Grid>(std::move(g)); }

template <class F>
ScalarField field(std::shared_ptr<const Grid> g, F&& f) {
  ScalarField out(g);
  for (std::size_t c = 0; c < g->size(); ++c) out[c] = f(g->center(c));
  return out;
}

FaceValues constant_faces(const Grid& g, double v) {
  FaceValues F;
  for (int a = 0; a < g.dims(); ++a) F.axis[static_cast<std::size_t>(a)].assign(g.face_count(a), v);
  return F;
}

constexpr Boundary kAll[] = {Boundary::ZeroFlux, Boundary::DirichletZero, Boundary::Periodic};

}  // namespace

TEST(Grid, SpacingAndInvariants) {
  const Grid g = Grid::plane({-1, 0}, {1, 3}, 8, 12);
  EXPECT_EQ(g.h(0), 0.25);
  EXPECT_EQ(g.h(1), 0.25);
  EXPECT_EQ(g.size(), 96u);
  EXPECT_EQ(g.cell_volume(), 0.0625);
  EXPECT_THROW(Grid::line(0, 1, 3), DomainError);
  EXPECT_THROW(Grid::line(1, 0, 8), DomainError);
  EXPECT_THROW(Grid(3, {0, 0}, {1, 1}, {4, 4}, Boundary::ZeroFlux), DomainError);
  EXPECT_EQ(boundary_from_string(to_string(Boundary::Periodic)), Boundary::Periodic);
}

TEST(FaceGradient, ConstantFieldIsZero) {
  for (Boundary bc : kAll) {
    if (bc == Boundary::DirichletZero) continue;
    const auto g = make(Grid::plane({0, 0}, {1, 1}, 6, 5, bc));
    const auto F = face_gradient(ScalarField(g, 2.5));
    for (const auto& ax : F.axis)
      for (double v : ax) EXPECT_EQ(v, 0.0);
  }
}

TEST(FaceGradient, LinearProfileInterior) {
  const auto g = make(Grid::line(0.0, 1.0, 4));
  const auto F = face_gradient(field(g, [](Vec2 x) { return x[0]; }));
  for (int i = 1; i < 4; ++i) EXPECT_DOUBLE_EQ(F.axis[0][g->face_index(0, i, 0)], 1.0);
  EXPECT_EQ(F.axis[0][0], 0.0);
  EXPECT_EQ(F.axis[0][4], 0.0);
}

TEST(FaceGradient, DirichletIsOneSidedAgainstZero) {
  const auto g = make(Grid::line(0.0, 1.0, 4, Boundary::DirichletZero));
  const auto F = face_gradient(ScalarField(g, 1.0));
  // Ghost -1 at distance h: (1 - (-1))/h at the left face.
  EXPECT_DOUBLE_EQ(F.axis[0][0], 2.0 / 0.25);
  EXPECT_DOUBLE_EQ(F.axis[0][4], -2.0 / 0.25);
}

TEST(FaceGradient, PeriodicSineConvergesAtOrderTwo) {
  std::vector<double> err;
  for (int n : {32, 64, 128, 256}) {
    const auto g = make(Grid::line(0.0, 1.0, n, Boundary::Periodic));
    const auto F = face_gradient(field(g, [](Vec2 x) { return std::sin(2 * std::numbers::pi * x[0]); }));
    double e = 0.0;
    for (int i = 0; i <= n; ++i) {
      const double x = g->face_center(0, i, 0)[0];
      e = std::max(e, std::abs(F.axis[0][g->face_index(0, i, 0)] - 2 * std::numbers::pi * std::cos(2 * std::numbers::pi * x)));
    }
    err.push_back(e);
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_NEAR(std::log2(err[i - 1] / err[i]), 2.0, 0.05);
}

TEST(Divergence, ConstantFluxIsZeroForEveryBoundary) {
  for (Boundary bc : kAll)
    for (int dims : {1, 2}) {
      const auto g = make(dims == 1 ? Grid::line(0, 2, 9, bc) : Grid::plane({0, 0}, {2, 1}, 7, 5, bc));
      const auto d = divergence(g, constant_faces(*g, 3.7));
      for (double v : d.values) EXPECT_EQ(v, 0.0);
    }
}

TEST(Divergence, LinearFluxGivesOne) {
  const auto g = make(Grid::line(0.0, 1.0, 10));
  FaceValues F;
  F.axis[0].resize(g->face_count(0));
  for (int i = 0; i <= 10; ++i) F.axis[0][static_cast<std::size_t>(i)] = g->face_center(0, i, 0)[0];
  for (double v : divergence(g, F).values) EXPECT_NEAR(v, 1.0, 1e-13);
}

TEST(Divergence, ZeroFluxTelescopesForRandomFlux) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> d(0.0, 10.0);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = make(trial % 2 ? Grid::line(-1, 1, 16 + trial) : Grid::plane({-1, -1}, {1, 2}, 9 + trial, 7 + trial));
    FaceValues F;
    for (int a = 0; a < g->dims(); ++a) {
      F.axis[static_cast<std::size_t>(a)].resize(g->face_count(a));
      for (auto& v : F.axis[static_cast<std::size_t>(a)]) v = d(rng);
    }
    apply_boundary_flux(*g, F);
    const auto div = divergence(g, F);
    double scale = 0.0;
    for (double v : div.values) scale += std::abs(v);
    EXPECT_LE(std::abs(integrate(div)), 1e-13 * scale * g->cell_volume());
  }
}

TEST(Divergence, RejectsWrongFaceCount) {
  const auto g = make(Grid::line(0, 1, 8));
  FaceValues F;
  F.axis[0].assign(3, 0.0);
  EXPECT_THROW(divergence(g, F), DomainError);
}

TEST(Integrate, UnitMeasureAndZero) {
  const auto g = make(Grid::plane({0, 0}, {1, 1}, 10, 10));
  EXPECT_DOUBLE_EQ(integrate(ScalarField(g, 1.0)), 1.0);
  EXPECT_EQ(integrate(ScalarField(g, 0.0)), 0.0);
}

TEST(Integrate, FullGridIsVolumeTimesSum) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  const auto g = make(Grid::plane({0, 0}, {1, 3}, 13, 17));
  ScalarField f(g);
  double s = 0.0;
  for (auto& v : f.values) s += (v = d(rng));
  EXPECT_EQ(integrate(f), g->cell_volume() * s);
}

TEST(Integrate, DiskAreaConvergesAtFirstOrder) {
  for (int n : {64, 256, 1024}) {
    const auto g = make(Grid::plane({0, 0}, {1, 1}, n, n));
    const auto r = integrate(ScalarField(g, 1.0), Ball{{0.5, 0.5}, 0.5});
    EXPECT_FALSE(r.empty);
    EXPECT_NEAR(r.value, std::numbers::pi / 4, 4.0 / n);
  }
}

TEST(Integrate, EmptyRegionReturnsZeroWithFlag) {
  const auto g = make(Grid::plane({0, 0}, {1, 1}, 8, 8));
  const auto r = integrate(ScalarField(g, 1.0), Ball{{5, 5}, 0.1});
  EXPECT_TRUE(r.empty);
  EXPECT_EQ(r.value, 0.0);
}

TEST(Extrema, ConstantAndLinear) {
  const auto g = make(Grid::line(0, 1, 20));
  const auto c = extrema(ScalarField(g, 0.3), Box{{0, 0}, {1, 1}});
  EXPECT_EQ(c.inf, 0.3);
  EXPECT_EQ(c.sup, 0.3);
  const auto e = extrema(field(g, [](Vec2 x) { return x[0]; }), Box{{0, 0}, {1, 1}});
  EXPECT_DOUBLE_EQ(e.inf, 0.025);
  EXPECT_DOUBLE_EQ(e.sup, 0.975);
  EXPECT_THROW(extrema(ScalarField(g, 1.0), Ball{{3, 0}, 0.1}), DomainError);
}

TEST(Extrema, BarenblattLikePeakWithinMesh) {
  // A paraboloid cap peaked at the origin; the sampled sup misses the peak
  // by O(h^2) when the origin is a vertex.
  for (int n : {16, 64}) {
    const auto g = make(Grid::plane({-1, -1}, {1, 1}, n, n));
    const auto f = field(g, [](Vec2 x) { return std::max(0.0, 1.0 - dot(x, x)); });
    const double h = 2.0 / n;
    EXPECT_NEAR(extrema(f).sup, 1.0, h * h);
  }
}

TEST(Cylinder, ClippingRecordsFlag) {
  const Grid g = Grid::plane({0, 0}, {1, 1}, 8, 8);
  const Cylinder inside({0.5, 0.5}, 1.0, 0.2, 0.5);
  EXPECT_FALSE(inside.clipped_to(g, 0.0, 2.0).clipped);
  const auto late = Cylinder({0.5, 0.5}, 3.0, 0.2, 0.5).clipped_to(g, 0.0, 2.0);
  EXPECT_TRUE(late.clipped);
  EXPECT_EQ(late.t0, 2.0);
  const auto deep = Cylinder({0.5, 0.5}, 1.0, 0.2, 5.0).clipped_to(g, 0.0, 2.0);
  EXPECT_TRUE(deep.clipped);
  EXPECT_EQ(deep.t_bottom(), 0.0);
  EXPECT_TRUE(Cylinder({0.9, 0.5}, 1.0, 0.2, 0.5).clipped_to(g, 0.0, 2.0).clipped);
  EXPECT_THROW(Cylinder({0, 0}, 1.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(Cylinder({0, 0}, 1.0, 1.0, 0.0), DomainError);
}

TEST(Fields, CountAndNonnegativity) {
  const auto g = make(Grid::line(0, 1, 8));
  EXPECT_THROW(ScalarField(g, std::vector<double>(7, 0.0)), DomainError);
  StateVector s(g, 2);
  EXPECT_TRUE(s.nonnegative());
  s[1][3] = -1e-300;
  EXPECT_FALSE(s.nonnegative());
  EXPECT_THROW(StateVector(g, 0), DomainError);
}

TEST(BoundaryLayer, CountsOutermostCells) {
  const auto g = make(Grid::plane({0, 0}, {1, 1}, 4, 4));
  EXPECT_DOUBLE_EQ(boundary_layer_mass(ScalarField(g, 1.0)), 12.0 / 16.0);
  const auto l = make(Grid::line(0, 1, 4));
  EXPECT_DOUBLE_EQ(boundary_layer_mass(ScalarField(l, 1.0)), 0.5);
}
