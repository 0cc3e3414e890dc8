#include <eulerlab/grid.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace eulerlab;

namespace {

constexpr double pi = std::numbers::pi;

double max_error(const ScalarField& f, auto&& exact, bool interior_only = false) {
  const Grid& g = f.grid();
  double e = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (interior_only && g.is_boundary(i, j)) continue;
      e = std::max(e, std::abs(f(i, j) - exact(g.x(i), g.y(j))));
    }
  }
  return e;
}

}  // namespace

TEST(Grid, StripGeometry) {
  Grid g = Grid::strip(12.0, 97, 33);
  EXPECT_EQ(g.kind(), DomainKind::StripTruncation);
  EXPECT_DOUBLE_EQ(g.x(0), -12.0);
  EXPECT_DOUBLE_EQ(g.x(96), 12.0);
  EXPECT_DOUBLE_EQ(g.y(0), -1.0);
  EXPECT_DOUBLE_EQ(g.y(32), 1.0);
  EXPECT_DOUBLE_EQ(g.hx(), 0.25);
  EXPECT_DOUBLE_EQ(g.hy(), 1.0 / 16.0);
  EXPECT_EQ(g.wall_rows(), (std::vector<int>{0, 32}));
  EXPECT_TRUE(g.is_boundary(0, 5));
  EXPECT_TRUE(g.is_boundary(5, 32));
  EXPECT_FALSE(g.is_boundary(5, 5));
}

TEST(Grid, TorusHasNoBoundary) {
  Grid g = Grid::torus(16);
  EXPECT_TRUE(g.periodic_x());
  EXPECT_TRUE(g.periodic_y());
  EXPECT_DOUBLE_EQ(g.hx(), 2.0 * pi / 16.0);
  EXPECT_FALSE(g.is_boundary(0, 0));
  EXPECT_TRUE(g.wall_rows().empty());
}

TEST(Grid, HalfPlaneAndQuadrantWalls) {
  Grid h = Grid::half_plane(20.0, 41, 21);
  EXPECT_EQ(h.wall_rows(), (std::vector<int>{0}));
  Grid q = Grid::quadrant(20.0, 21);
  EXPECT_EQ(q.kind(), DomainKind::Quadrant);
  EXPECT_DOUBLE_EQ(q.x_range().lo, 0.0);
}

TEST(Grid, RejectsBadShapes) {
  EXPECT_THROW(Grid(4, 16, {0.0, 1.0}, {0.0, 1.0}), Error);
  EXPECT_THROW(Grid(16, 16, {1.0, 1.0}, {0.0, 1.0}), Error);
  try {
    (void)Grid::strip(-1.0, 33, 17);
    FAIL() << "expected InvalidGrid";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidGrid);
  }
}

TEST(Grid, DomainKindNames) {
  for (auto k : {DomainKind::Plane, DomainKind::StripTruncation, DomainKind::HalfPlaneTruncation, DomainKind::Quadrant,
                 DomainKind::Torus}) {
    EXPECT_EQ(domain_kind_from_string(to_string(k)), k);
  }
  EXPECT_THROW((void)domain_kind_from_string("annulus"), Error);
}

TEST(Fields, RejectNonFiniteAndMismatchedSizes) {
  Grid g = Grid::torus(8);
  std::vector<double> bad(g.size(), 0.0);
  bad[3] = std::nan("");
  EXPECT_THROW(ScalarField(g, bad), Error);
  EXPECT_THROW(ScalarField(g, std::vector<double>(5, 0.0)), Error);
  ScalarField a(g);
  ScalarField b(Grid::torus(16));
  try {
    (void)(a + b);
    FAIL() << "expected IncompatibleGrid";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::IncompatibleGrid);
  }
}

TEST(Derivatives, SecondOrderOnBoxIncludingBoundary) {
  auto f = [](double x, double y) { return std::sin(x) * std::exp(0.5 * y); };
  auto fx = [](double x, double y) { return std::cos(x) * std::exp(0.5 * y); };
  auto fy = [](double x, double y) { return 0.5 * std::sin(x) * std::exp(0.5 * y); };
  double e_prev = 0.0;
  for (int n : {33, 65}) {
    Grid g(n, n, {0.0, 2.0}, {-1.0, 1.0});
    ScalarField u = sample(g, f);
    double e = std::max(max_error(d_dx(u), fx), max_error(d_dy(u), fy));
    if (e_prev > 0.0) {
      EXPECT_NEAR(std::log2(e_prev / e), 2.0, 0.2);
    }
    e_prev = e;
  }
}

TEST(Derivatives, PeriodicSpectralLikeAccuracy) {
  Grid g = Grid::torus(64);
  ScalarField u = sample(g, [](double x, double y) { return std::sin(x) * std::cos(2.0 * y); });
  ScalarField lap = laplacian(u);
  double e = max_error(lap, [](double x, double y) { return -5.0 * std::sin(x) * std::cos(2.0 * y); });
  EXPECT_LT(e, 5.0 * 4.0 * std::pow(g.hx(), 2));
}

TEST(Derivatives, PerpGradientIsDivergenceFree) {
  Grid g(41, 41, {-1.0, 1.0}, {-1.0, 1.0});
  ScalarField u = sample(g, [](double x, double y) { return x * x * y + std::sin(y); });
  VectorField v = perp_gradient(u);
  EXPECT_NEAR(v.u_values()[g.index(20, 30)], -(g.x(20) * g.x(20) + std::cos(g.y(30))), 1e-2);
  EXPECT_LT(interior_max_abs(divergence(v)), 1e-12);
}

TEST(Quadrature, TrapezoidExactForLinearAndTorusForTrig) {
  Grid g(17, 9, {0.0, 2.0}, {0.0, 1.0});
  ScalarField u = sample(g, [](double x, double y) { return 1.0 + x + 3.0 * y; });
  EXPECT_NEAR(integrate(u), 2.0 + 2.0 + 3.0, 1e-13);
  Grid t = Grid::torus(32);
  ScalarField s = sample(t, [](double x, double y) { return std::pow(std::sin(x) * std::cos(y), 2); });
  EXPECT_NEAR(integrate(s), pi * pi, 1e-12);
}

TEST(Quadrature, RestrictedIntegral) {
  Grid g(21, 21, {0.0, 1.0}, {0.0, 1.0});
  ScalarField one = sample(g, [](double, double) { return 1.0; });
  double left = integrate(one, [&](int i, int) { return g.x(i) <= 0.5; });
  EXPECT_GT(left, 0.45);
  EXPECT_LT(left, 0.55);
}
