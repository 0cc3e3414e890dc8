#include <eulerlab/elliptic2d.hpp>
#include <eulerlab/streamlines.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace eulerlab;

namespace {

constexpr double pi = std::numbers::pi;

double stream_spread(const ScalarField& u, const Polyline& line) {
  double lo = HUGE_VAL, hi = -HUGE_VAL;
  for (const Vec2& p : line.points) {
    double s = interpolate(u, p[0], p[1]).value();
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return hi - lo;
}

}  // namespace

TEST(Interpolate, BilinearIsExactForBilinearData) {
  Grid g(11, 11, {0.0, 1.0}, {0.0, 2.0});
  ScalarField f = sample(g, [](double x, double y) { return 1.0 + 2.0 * x - y + 3.0 * x * y; });
  EXPECT_NEAR(interpolate(f, 0.33, 1.71).value(), 1.0 + 0.66 - 1.71 + 3.0 * 0.33 * 1.71, 1e-13);
  EXPECT_FALSE(interpolate(f, 1.2, 0.5).has_value());
  Grid t = Grid::torus(16);
  ScalarField c = sample(t, [](double x, double) { return std::cos(x); });
  EXPECT_NEAR(interpolate(c, 2.0 * pi + 0.1, 0.0).value(), interpolate(c, 0.1, 0.0).value(), 1e-14);
}

TEST(Trace, CouetteStaysOnItsLevel) {
  Flow f = analytic_flow(AnalyticFlowName::Couette, Grid::strip(4.0, 65, 17));
  Polyline line = trace(f, {-3.0, 0.4});
  EXPECT_EQ(line.termination, Termination::LeftDomain);
  for (const Vec2& p : line.points) EXPECT_NEAR(p[1], 0.4, 1e-12);
  EXPECT_NEAR(line.points.back()[0], 4.0, f.grid.hx());
  Polyline back = trace(f, {-3.0, -0.4});
  EXPECT_LT(back.points.back()[0], -3.0);
}

TEST(Trace, TaylorGreenCellOrbitCloses) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(128));
  Polyline line = trace(f, {pi / 2.0 + 0.3, pi / 2.0});
  EXPECT_EQ(line.termination, Termination::Closed);
  EXPECT_TRUE(line.closed);
  EXPECT_LT(stream_spread(*f.stream, line), 0.5 * f.grid.hx() * f.grid.hx());
}

TEST(Trace, DirectionReversesTheOrbit) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(128));
  TraceOptions fwd{.max_steps = 20};
  TraceOptions bwd{.max_steps = 20, .direction = -1};
  Polyline a = trace(f, {1.0, 2.0}, fwd);
  Polyline b = trace(f, {1.0, 2.0}, bwd);
  Vec2 da{a.points[1][0] - a.points[0][0], a.points[1][1] - a.points[0][1]};
  Vec2 db{b.points[1][0] - b.points[0][0], b.points[1][1] - b.points[0][1]};
  double cosine = (da[0] * db[0] + da[1] * db[1]) / (std::hypot(da[0], da[1]) * std::hypot(db[0], db[1]));
  EXPECT_LT(cosine, -0.999);
  EXPECT_NEAR(std::hypot(da[0], da[1]), std::hypot(db[0], db[1]), 1e-6);
  EXPECT_EQ(a.termination, Termination::MaxSteps);
}

TEST(Trace, SeedOutsideTheGridIsRejected) {
  Flow f = analytic_flow(AnalyticFlowName::Couette, Grid::strip(4.0, 65, 17));
  try {
    (void)trace(f, {0.0, 1.5});
    FAIL() << "expected SeedOutsideDomain";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SeedOutsideDomain);
  }
}

TEST(Trace, StagnationStopsTheTrace) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(64));
  Polyline line = trace(f, {0.0, 0.0});
  EXPECT_EQ(line.termination, Termination::Stagnated);
  EXPECT_EQ(line.points.size(), 1u);
}

TEST(Contours, StraightLevelOfLinearField) {
  Grid g(33, 17, {-2.0, 2.0}, {-1.0, 1.0});
  ScalarField u = sample(g, [](double, double y) { return y; });
  auto lines = level_contours(u, {0.5});
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_FALSE(lines[0].closed);
  for (const Vec2& p : lines[0].points) EXPECT_NEAR(p[1], 0.5, 1e-12);
  EXPECT_GE(lines[0].points.size(), 33u);
}

TEST(Contours, TaylorGreenCellLoops) {
  Grid g = Grid::torus(64);
  ScalarField u = sample(g, [](double x, double y) { return std::sin(x) * std::sin(y); });
  auto plus = level_contours(u, {0.5});
  ASSERT_EQ(plus.size(), 2u);
  for (const Polyline& line : plus) {
    EXPECT_TRUE(line.closed);
    for (const Vec2& p : line.points) EXPECT_NEAR(std::sin(p[0]) * std::sin(p[1]), 0.5, 2e-3);
  }
  EXPECT_EQ(level_contours(u, {-0.5, 0.5}).size(), 4u);
  EXPECT_TRUE(level_contours(u, {2.0}).empty());
}

TEST(Contours, SaddleZeroLevelFollowsTheAxes) {
  SaddleResult s = solve_saddle_quadrant(Nonlinearity::allen_cahn(), 20.0, 81, 1e-10);
  ScalarField full = reflect_x2(s.u);
  auto lines = level_contours(full, {0.0});
  double off_axis = 0.0;
  std::size_t points = 0;
  for (const Polyline& line : lines) {
    for (const Vec2& p : line.points) {
      off_axis = std::max(off_axis, std::min(std::abs(p[0]), std::abs(p[1])));
      ++points;
    }
  }
  EXPECT_GT(points, 0u);
  EXPECT_LT(off_axis, 1e-12);
}

TEST(Stagnation, TaylorGreenCellCorners) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(130));
  StagnationReport r = stagnation_points(f);
  EXPECT_EQ(r.points.size(), 8u);
  EXPECT_TRUE(r.degenerate.empty());
  for (const StagnationPoint& p : r.points) {
    double kx = p.x / (pi / 2.0), ky = p.y / (pi / 2.0);
    EXPECT_NEAR(kx, std::round(kx), 0.05);
    EXPECT_NEAR(ky, std::round(ky), 0.05);
  }
}

TEST(Stagnation, ShearFlowsHaveDegenerateLines) {
  Grid g = Grid::strip(4.0, 65, 33);
  StagnationReport c = stagnation_points(analytic_flow(AnalyticFlowName::Couette, g));
  EXPECT_TRUE(c.points.empty());
  ASSERT_EQ(c.degenerate.size(), 1u);
  EXPECT_DOUBLE_EQ(c.degenerate[0].y_extent.lo, 0.0);
  EXPECT_DOUBLE_EQ(c.degenerate[0].x_extent.hi, 4.0);
  StagnationReport k = stagnation_points(analytic_flow(AnalyticFlowName::Kolmogorov, g));
  EXPECT_EQ(k.degenerate.size(), 3u);
}

class Type3Streamlines : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Type3Result r = solve_type3_strip(Nonlinearity::arctan(4.0), 12.0, 385, 65, 1e-10);
    flow = new Flow(flow_from_stream(r.u, Nonlinearity::arctan(4.0)));
  }
  static void TearDownTestSuite() { delete flow; }
  static Flow* flow;
};

Flow* Type3Streamlines::flow = nullptr;

TEST_F(Type3Streamlines, TwoWallStagnationPoints) {
  StagnationReport r = stagnation_points(*flow);
  ASSERT_EQ(r.points.size(), 2u);
  for (const StagnationPoint& p : r.points) {
    EXPECT_NEAR(p.x, 0.0, 1e-9);
    EXPECT_NEAR(std::abs(p.y), 1.0, 1e-12);
  }
}

TEST_F(Type3Streamlines, StreamlineTurnsBackAndKeepsItsLevel) {
  Polyline line = trace(*flow, {-8.0, -0.5});
  EXPECT_EQ(line.termination, Termination::LeftDomain);
  EXPECT_NEAR(line.points.back()[0], -12.0, 0.1);
  EXPECT_NEAR(line.points.back()[1], 0.5, 0.02);
  double furthest = -HUGE_VAL;
  for (const Vec2& p : line.points) furthest = std::max(furthest, p[0]);
  EXPECT_LT(furthest, 0.0);
  EXPECT_GT(furthest, -4.0);
  EXPECT_LT(stream_spread(*flow->stream, line), 1e-3);
}

TEST_F(Type3Streamlines, TraceThroughJoinsBothHalves) {
  Polyline line = trace_through(*flow, {-8.0, -0.5});
  EXPECT_NEAR(line.points.front()[0], -12.0, 0.1);
  EXPECT_NEAR(line.points.back()[0], -12.0, 0.1);
  EXPECT_NEAR(line.points.front()[1], -line.points.back()[1], 0.02);
}
