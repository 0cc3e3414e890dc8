#include <eulerlab/diagnostics.hpp>
#include <eulerlab/elliptic2d.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace eulerlab;

namespace {

constexpr double pi = std::numbers::pi;

AngleSet synthetic(int n, auto&& occupied) {
  AngleSet a;
  a.n_bins = n;
  a.occupied.assign(n, false);
  a.mass.assign(n, 0.0);
  for (int b = 0; b < n; ++b) a.occupied[b] = occupied(b);
  return a;
}

AnalyzeOptions options(std::vector<double> R, int bins = 360) {
  AnalyzeOptions o;
  o.n_bins = bins;
  o.R_list = std::move(R);
  return o;
}

}  // namespace

TEST(Angles, SignedAngleConvention) {
  EXPECT_DOUBLE_EQ(angle_from({1.0, 0.0}, {0.0, 2.0}), pi / 2.0);
  EXPECT_DOUBLE_EQ(angle_from({1.0, 0.0}, {0.0, -2.0}), -pi / 2.0);
  EXPECT_DOUBLE_EQ(angle_from({1.0, 0.0}, {-3.0, 0.0}), pi);
  EXPECT_DOUBLE_EQ(angle_from({0.0, 1.0}, {1.0, 0.0}), -pi / 2.0);
  EXPECT_DOUBLE_EQ(angle_from({1.0, 0.0}, {0.0, 0.0}), 0.0);
  try {
    (void)angle_from({2.0, 0.0}, {1.0, 1.0});
    FAIL() << "expected NonUnitReference";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonUnitReference);
  }
  EXPECT_DOUBLE_EQ(flow_angle(-1.0, 0.0), pi);
  EXPECT_DOUBLE_EQ(flow_angle(-1.0, -0.0), pi);
}

TEST(Angles, BinsAreHalfOpenFromBelow) {
  int n = 64;
  EXPECT_EQ(angle_bin(0.0, n), n / 2 - 1);
  EXPECT_EQ(angle_bin(1e-12, n), n / 2);
  EXPECT_EQ(angle_bin(pi, n), n - 1);
  EXPECT_EQ(angle_bin(-pi + 1e-12, n), 0);
  EXPECT_EQ(angle_bin(pi / 2.0, n), 3 * n / 4 - 1);
}

TEST(Classify, SyntheticOccupancies) {
  using Kind = Classification::Kind;
  int n = 32;
  EXPECT_EQ(classify(synthetic(n, [](int) { return true; }), 1.0).kind, Kind::FullCircle);
  EXPECT_EQ(classify(synthetic(n, [](int) { return true; }), 1e-13).kind, Kind::Shear);
  EXPECT_EQ(classify(synthetic(n, [&](int b) { return b >= n / 2 - 1; }), 1.0).kind, Kind::TypeIIIUpper);
  EXPECT_EQ(classify(synthetic(n, [&](int b) { return b >= n / 2 && b <= n - 2; }), 1.0).kind, Kind::TypeIIIUpper);
  EXPECT_EQ(classify(synthetic(n, [&](int b) { return b <= n / 2 - 1 || b == n - 1; }), 1.0).kind,
            Kind::TypeIIILower);
  Classification arc = classify(synthetic(n, [&](int b) { return b >= 4 && b < 12; }), 1.0);
  EXPECT_EQ(arc.kind, Kind::Arc);
  EXPECT_NEAR(arc.beta, pi - 4.0 * 2.0 * pi / n, 1e-12);
  EXPECT_NEAR(arc.theta0, -pi + 8 * 2.0 * pi / n, 1e-12);
  EXPECT_EQ(classify(synthetic(n, [&](int b) { return b % 4 == 0; }), 1.0).kind, Kind::Indeterminate);
  EXPECT_EQ(classify(synthetic(n, [&](int b) { return b >= n / 2 && b <= n - 3; }), 1.0).kind, Kind::Arc);
}

TEST(Curvature, ShearFlowsHaveNone) {
  Grid g = Grid::strip(12.0, 257, 65);
  for (auto name : {AnalyticFlowName::Couette, AnalyticFlowName::Poiseuille, AnalyticFlowName::Kolmogorov}) {
    Flow f = analytic_flow(name, g);
    EXPECT_LE(total_curvature(f), 1e-12) << to_string(name);
    DiagnosticsReport r = analyze(f, options({3.0}));
    EXPECT_EQ(r.verdict.kind, Classification::Kind::Shear) << to_string(name);
    EXPECT_LE(std::abs(r.J_inf_trace[0].second), 1e-12);
  }
}

TEST(Curvature, TaylorGreenTotalIsEightPi) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(256));
  double cell = total_curvature(f);
  double nodal = total_curvature(f, {}, {.kind = CurvatureQuadrature::Nodal});
  EXPECT_NEAR(cell, 8.0 * pi, 1e-3 * 8.0 * pi);
  EXPECT_NEAR(nodal, 8.0 * pi, 1e-3 * 8.0 * pi);
  EXPECT_NEAR(signed_curvature_integral(f), 0.0, 1e-10);
  DiagnosticsReport r = analyze(f);
  EXPECT_EQ(r.verdict.kind, Classification::Kind::FullCircle);
  EXPECT_GT(r.lower_bound_gap, 1.0);
}

TEST(Curvature, RegionRestrictionSplitsTheTotal) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(128));
  const Grid& g = f.grid;
  double left = total_curvature(f, [&](int i, int) { return g.x(i) < pi; });
  double right = total_curvature(f, [&](int i, int) { return g.x(i) >= pi; });
  EXPECT_NEAR(left + right, total_curvature(f), 1e-10);
  EXPECT_NEAR(left, right, 1e-2);
}

TEST(Curvature, ScalesQuadratically) {
  Flow f = analytic_flow(AnalyticFlowName::ExponentialCounterexample, Grid(65, 65, {-1.0, 1.0}, {-1.0, 1.0}));
  EXPECT_NEAR(total_curvature(scaled(f, 3.0)) / total_curvature(f), 9.0, 1e-10);
}

TEST(Curvature, IdentityFormsAgree) {
  AnalyticJet jet = detail::catalog_jet(AnalyticFlowName::TaylorGreen);
  for (double x : {0.3, 1.1, 2.5}) {
    for (double y : {0.2, 1.4, 2.9}) EXPECT_LT(curvature_identity_residual_analytic(jet, x, y), 1e-13);
  }
  AnalyticJet e = detail::catalog_jet(AnalyticFlowName::ExponentialCounterexample);
  EXPECT_LT(curvature_identity_residual_analytic(e, 0.4, -0.3), 1e-13);
  double coarse = analyze(analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(128))).identity_residual_max;
  double fine = analyze(analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(256))).identity_residual_max;
  EXPECT_LT(fine, 0.05);
  EXPECT_GT(coarse / fine, 1.8);
}

TEST(Curvature, ExponentialFlowIsAnArc) {
  Flow f = analytic_flow(AnalyticFlowName::ExponentialCounterexample, Grid(129, 129, {-1.0, 1.0}, {-1.0, 1.0}));
  DiagnosticsReport r = analyze(f);
  ASSERT_EQ(r.verdict.kind, Classification::Kind::Arc);
  double w = 2.0 * pi / 360;
  EXPECT_NEAR(r.verdict.beta, 3.0 * pi / 4.0, 2.0 * w);
  EXPECT_NEAR(std::abs(r.verdict.theta0), pi, 2.0 * w);
}

TEST(Curvature, KappaIsUniformForTaylorGreen) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(256));
  CurvatureProfile k = kappa_distribution(f, 64);
  EXPECT_NEAR(k.total, total_curvature(f), 1e-9);
  EXPECT_LT(coefficient_of_variation(k.bin_mass), 0.05);
  EXPECT_THROW((void)kappa_distribution(f, 15), Error);
}

TEST(Statistics, CoefficientOfVariation) {
  EXPECT_DOUBLE_EQ(coefficient_of_variation({2.0, 2.0, 2.0}), 0.0);
  EXPECT_NEAR(coefficient_of_variation({1.0, 3.0}), 0.5, 1e-15);
  EXPECT_EQ(interior_upper_bins(8), (std::vector<int>{4, 5, 6}));
  EXPECT_EQ(interior_lower_bins(8), (std::vector<int>{0, 1, 2}));
}

TEST(Cutoffs, LinearAndLogarithmic) {
  EXPECT_DOUBLE_EQ(cutoff_linear(1.0, 2.0), 1.0);
  EXPECT_DOUBLE_EQ(cutoff_linear(-3.0, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(cutoff_linear(5.0, 2.0), 0.0);
  EXPECT_NEAR(cutoff_log(std::pow(3.0, 1.5), 3.0), 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(cutoff_log(10.0, 3.0), 0.0);
  EXPECT_THROW((void)cutoff_log(1.0, 1.0), Error);
}

TEST(Margin, ShearProfiles) {
  Grid g = Grid::strip(4.0, 65, 65);
  Profile sq = sample_profile(g.y_range(), g.ny(), [](double y) { return y * y; });
  Profile lin = sample_profile(g.y_range(), g.ny(), [](double y) { return y; });
  StabilityMargin p = stability_margin(analytic_flow(AnalyticFlowName::Poiseuille, g), sq, MarginMode::VorticityGradient);
  EXPECT_NEAR(p.value, 2.0, 1e-8);
  EXPECT_TRUE(p.applicable);
  EXPECT_FALSE(stability_margin(analytic_flow(AnalyticFlowName::Couette, g), lin, MarginMode::VorticityGradient).applicable);
  EXPECT_LT(stability_margin(analytic_flow(AnalyticFlowName::Kolmogorov, g), sq, MarginMode::VorticityGradient).value, 0.0);
  EXPECT_NEAR(stability_margin(analytic_flow(AnalyticFlowName::Poiseuille, g), sq, MarginMode::W2inf).value, 0.0, 1e-10);
  Profile wrong = sample_profile(g.y_range(), 17, [](double y) { return y; });
  EXPECT_THROW((void)stability_margin(analytic_flow(AnalyticFlowName::Couette, g), wrong, MarginMode::W2inf), Error);
  try {
    (void)stability_margin(analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(65)), lin, MarginMode::W2inf);
    FAIL() << "expected NotAStripGrid";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotAStripGrid);
  }
}

class Type3Diagnostics : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    Type3Result r = solve_type3_strip(Nonlinearity::arctan(4.0), 12.0, 193, 33, 1e-10);
    flow = new Flow(flow_from_stream(r.u, Nonlinearity::arctan(4.0)));
  }
  static void TearDownTestSuite() { delete flow; }
  static Flow* flow;
};

Flow* Type3Diagnostics::flow = nullptr;

TEST_F(Type3Diagnostics, UpperSemicircleAndEqualityCase) {
  DiagnosticsReport r = analyze(*flow, options({4.0, 6.0}, 64));
  EXPECT_EQ(r.verdict.kind, Classification::Kind::TypeIIIUpper);
  EXPECT_LE(std::abs(r.lower_bound_gap), 1e-6 * (1.0 + r.total_curvature));
  EXPECT_NEAR(r.J_inf_trace.back().second, r.J_inf_signed, 0.05 * r.J_inf_signed);
  EXPECT_LT(r.kappa_cv_upper, 0.08);
  ASSERT_TRUE(r.walls.has_value());
  EXPECT_LT(boundary_asymptotics_gap(*r.walls), 0.02);
}

TEST_F(Type3Diagnostics, MirrorImageIsLowerSemicircle) {
  DiagnosticsReport r = analyze(reflected_x2(*flow), options({4.0}, 64));
  EXPECT_EQ(r.verdict.kind, Classification::Kind::TypeIIILower);
}

TEST_F(Type3Diagnostics, TraceRejectsOversizedCutoff) {
  try {
    (void)boundary_trace_Jinf(*flow, {13.0});
    FAIL() << "expected RTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RTooLarge);
  }
}

TEST(Analyze, RejectsBadBinCounts) {
  Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(32));
  EXPECT_THROW((void)angle_set(f, 1e-6, 7), Error);
  EXPECT_THROW((void)angle_set(f, 0.0, 64), Error);
}
