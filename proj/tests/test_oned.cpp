#include <eulerlab/oned.hpp>
#include <gtest/gtest.h>

#include <cmath>

using namespace eulerlab;

namespace {

/// u'' = -f(u), u(-1) = 0, u'(-1) = s, integrated by RK4 to x = 0.
double shoot_midpoint_slope(const Nonlinearity& nl, double s, int steps = 20000) {
  double h = 1.0 / steps;
  double u = 0.0, p = s;
  auto rhs = [&](double uu) { return -nl.f(uu); };
  for (int k = 0; k < steps; ++k) {
    double k1u = p, k1p = rhs(u);
    double k2u = p + 0.5 * h * k1p, k2p = rhs(u + 0.5 * h * k1u);
    double k3u = p + 0.5 * h * k2p, k3p = rhs(u + 0.5 * h * k2u);
    double k4u = p + h * k3p, k4p = rhs(u + h * k3u);
    u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
  }
  return p;
}

/// Slope at x = -1 of the even positive solution: u'(0) = 0.
double shooting_slope(const Nonlinearity& nl, double lo, double hi) {
  for (int it = 0; it < 80; ++it) {
    double mid = 0.5 * (lo + hi);
    (shoot_midpoint_slope(nl, mid) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST(StripProfile, MatchesShootingOracle) {
  Nonlinearity nl = Nonlinearity::arctan(4.0);
  Profile p = solve_strip_profile(nl, 2001, 1e-11);
  double s = shooting_slope(nl, 0.1, 10.0);
  EXPECT_NEAR(p.boundary_derivatives[0], s, 1e-5 * s);
  EXPECT_NEAR(p.boundary_derivatives[1], -s, 1e-5 * s);
  EXPECT_LT(p.residual, 1e-11);
}

TEST(StripProfile, EvenPositiveAndBelowBarrier) {
  Nonlinearity nl = Nonlinearity::arctan(4.0);
  Profile p = solve_strip_profile(nl, 401, 1e-11);
  int n = p.n();
  for (int k = 1; k < n - 1; ++k) {
    EXPECT_GT(p.values[k], 0.0);
    EXPECT_NEAR(p.values[k], p.values[n - 1 - k], 1e-12);
    double x = p.x(k);
    EXPECT_LE(p.values[k], 0.5 * nl.bound_M() * (1.0 - x * x) + 1e-12);
  }
}

TEST(StripProfile, BothStartsAgree) {
  Nonlinearity nl = Nonlinearity::arctan(3.0);
  Profile a = solve_strip_profile(nl, 801, 1e-11, {.start = Start::FromSub});
  Profile b = solve_strip_profile(nl, 801, 1e-11, {.start = Start::FromSuper});
  for (int k = 0; k < a.n(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-8);
  EXPECT_EQ(b.start, Start::FromSuper);
}

TEST(StripProfile, EnergyIsConserved) {
  Nonlinearity nl = Nonlinearity::arctan(4.0);
  Profile p = solve_strip_profile(nl, 2001, 1e-11);
  EXPECT_LT(energy_identity_spread(p, nl), 1e-4);
}

TEST(StripProfile, SmallLambdaHasNoSubsolution) {
  try {
    (void)solve_strip_profile(Nonlinearity::arctan(2.0), 201, 1e-10);
    FAIL() << "expected NoSubsolution";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoSubsolution);
  }
}

TEST(StripProfile, RejectsBadArguments) {
  EXPECT_THROW((void)solve_strip_profile(Nonlinearity::arctan(4.0), 3, 1e-10), Error);
  EXPECT_THROW((void)solve_strip_profile(Nonlinearity::arctan(4.0), 101, 0.0), Error);
  EXPECT_THROW((void)Nonlinearity::arctan(-1.0), Error);
}

TEST(Heteroclinic, MatchesTanh) {
  Nonlinearity nl = Nonlinearity::allen_cahn();
  Profile g = solve_heteroclinic(nl, 20.0, 2001, 1e-11);
  double err = 0.0;
  for (int k = 0; k < g.n(); ++k) err = std::max(err, std::abs(g.values[k] - std::tanh(g.x(k) / std::sqrt(2.0))));
  EXPECT_LT(err, 1e-4);
  EXPECT_NEAR(g.boundary_derivatives[0], 1.0 / std::sqrt(2.0), 1e-4);
  for (int k = 1; k < g.n(); ++k) EXPECT_GE(g.values[k], g.values[k - 1]);
}

TEST(Heteroclinic, ShortTruncationIsRejected) {
  try {
    (void)solve_heteroclinic(Nonlinearity::allen_cahn(), 5.0, 201, 1e-10);
    FAIL() << "expected BadTruncation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BadTruncation);
  }
}

TEST(Hypotheses, ArctanFamilySatisfiesThem) {
  HypothesisCheck h = check_strip_hypotheses(Nonlinearity::arctan(4.0));
  EXPECT_TRUE(h.all());
  EXPECT_FALSE(check_strip_hypotheses(Nonlinearity::arctan(2.0)).slope_above_threshold);
}

TEST(SampleProfile, InterpolatesLinearly) {
  Profile p = sample_profile({-1.0, 1.0}, 11, [](double x) { return 2.0 * x + 1.0; });
  EXPECT_NEAR(p.at(0.33), 1.66, 1e-14);
  EXPECT_NEAR(p.at(5.0), 3.0, 1e-14);
  EXPECT_NEAR(boundary_slope(p, End::lower), 2.0, 1e-12);
}
