#include <eulerlab/elliptic2d.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace eulerlab;

namespace {

constexpr double pi = std::numbers::pi;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::InvalidArgument;
}

}  // namespace

TEST(LinearSolve, SineTransformMatchesConjugateGradient) {
  Grid g(33, 17, {0.0, 2.0}, {-1.0, 1.0});
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ScalarField rhs(g), data(g);
  for (std::size_t k = 0; k < g.size(); ++k) rhs[k] = u(rng);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) data(i, j) = u(rng);
    }
  }
  for (double shift : {0.0, 2.5}) {
    ScalarField a = linear_solve(g, shift, rhs, data, LinearMethod::SineTransform);
    ScalarField b = linear_solve(g, shift, rhs, data, LinearMethod::ConjugateGradient);
    EXPECT_LT(max_abs(a - b), 1e-10);
  }
}

TEST(LinearSolve, ManufacturedSolutionIsSecondOrder) {
  auto exact = [](double x, double y) { return std::sin(pi * x) * std::sinh(y) + x * y; };
  double shift = 1.5;
  auto source = [&](double x, double y) { return (pi * pi - 1.0 + shift) * std::sin(pi * x) * std::sinh(y) + shift * x * y; };
  double prev = 0.0;
  for (int n : {17, 33, 65}) {
    Grid g(n, n, {0.0, 1.0}, {0.0, 1.0});
    ScalarField u = linear_solve(g, shift, sample(g, source), sample(g, exact), LinearMethod::SineTransform);
    double e = max_abs(u - sample(g, exact));
    if (prev > 0.0) {
      EXPECT_NEAR(std::log2(prev / e), 2.0, 0.1);
    }
    prev = e;
  }
}

TEST(LinearSolve, RejectsPeriodicGridsAndNegativeShift) {
  Grid t = Grid::torus(16);
  EXPECT_THROW((void)linear_solve(t, 1.0, ScalarField(t), ScalarField(t)), Error);
  Grid g(16, 16, {0.0, 1.0}, {0.0, 1.0});
  EXPECT_THROW((void)linear_solve(g, -1.0, ScalarField(g), ScalarField(g)), Error);
}

TEST(Semilinear, LinearProblemConvergesToDirectSolve) {
  Grid g(33, 33, {0.0, 1.0}, {0.0, 1.0});
  EllipticProblem p;
  p.grid = g;
  p.nl = Nonlinearity::custom([](double s) { return 1.0 - s; }, [](double) { return -1.0; },
                              [](double s) { return s - 0.5 * s * s; }, 1.0, "one-minus");
  p.dirichlet = ScalarField(g);
  SolveResult r = solve_semilinear(p, from_sub(ScalarField(g)), 1e-11);
  ScalarField direct = linear_solve(g, 1.0, sample(g, [](double, double) { return 1.0; }), ScalarField(g),
                                    LinearMethod::SineTransform);
  EXPECT_LT(max_abs(r.u - direct), 1e-10);
  EXPECT_TRUE(r.report.monotone);
}

TEST(Semilinear, RejectsStartThatIsNotASubsolution) {
  Grid g(17, 17, {0.0, 1.0}, {0.0, 1.0});
  EllipticProblem p;
  p.grid = g;
  p.nl = Nonlinearity::arctan(4.0);
  p.dirichlet = ScalarField(g);
  ScalarField bump = sample(g, [](double x, double y) { return 5.0 * std::sin(pi * x) * std::sin(pi * y); });
  EXPECT_EQ(code_of([&] { (void)solve_semilinear(p, from_sub(bump), 1e-8); }), ErrorCode::NotASubsolution);
  EXPECT_EQ(code_of([&] { (void)solve_semilinear(p, from_super(-0.02 * bump), 1e-8); }),
            ErrorCode::NotASupersolution);
}

TEST(Barriers, BoxesOutsideTheGridAreRejected) {
  Grid g = Grid::strip(4.0, 33, 17);
  EXPECT_EQ(code_of([&] { (void)subsolution_box(g, 0.1, {10.0, 12.0}, {-0.5, 0.5}); }), ErrorCode::BoxOutsideGrid);
  EXPECT_EQ(code_of([&] { (void)subsolution_strip(g, 0.1, 0.05, 100.0); }), ErrorCode::BoxOutsideGrid);
  EXPECT_EQ(code_of([&] { (void)subsolution_strip(g, 0.1, 1.5, 0.0); }), ErrorCode::InvalidArgument);
}

TEST(Barriers, StripSubsolutionSatisfiesStencilInequality) {
  Nonlinearity nl = Nonlinearity::arctan(4.0);
  Grid g(129, 33, {0.0, 12.0}, {-1.0, 1.0}, DomainKind::StripTruncation);
  double delta = 0.05;
  double c = pi * pi / (4.0 * (1.0 - delta) * (1.0 - delta)) + delta * delta;
  double eps = subsolution_amplitude(nl, c);
  ScalarField s = subsolution_strip(g, eps, delta, 0.0);
  ScalarField r = residual(s, nl);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_LE(r[k], 1e-12);
}

class Type3Strip : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    result = new Type3Result(solve_type3_strip(Nonlinearity::arctan(4.0), 12.0, 193, 33, 1e-10));
  }
  static void TearDownTestSuite() { delete result; }
  static Type3Result* result;
};

Type3Result* Type3Strip::result = nullptr;

TEST_F(Type3Strip, SolvesTheEquation) {
  EXPECT_LT(result->report.final_residual, 1e-10);
  EXPECT_LT(interior_max_abs(residual(result->u, Nonlinearity::arctan(4.0))), 1e-9);
}

TEST_F(Type3Strip, OddInX1EvenInX2AndMonotone) {
  const ScalarField& u = result->u;
  const Grid& g = u.grid();
  double odd = 0.0, even = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      odd = std::max(odd, std::abs(u(i, j) + u(g.nx() - 1 - i, j)));
      even = std::max(even, std::abs(u(i, j) - u(i, g.ny() - 1 - j)));
    }
  }
  EXPECT_LT(odd, 1e-12);
  EXPECT_LT(even, 1e-9);
  ScalarField ux = d_dx(u);
  for (int j = 1; j < g.ny() - 1; ++j) {
    for (int i = 1; i < g.nx() - 1; ++i) EXPECT_GE(ux(i, j), -1e-8);
  }
}

TEST_F(Type3Strip, AttachesToTheProfile) {
  EXPECT_FALSE(result->attachment_warning);
  EXPECT_LT(result->attachment_error, 1e-4);
  const Grid& g = result->u.grid();
  for (int j = 0; j < g.ny(); ++j) EXPECT_NEAR(result->u(g.nx() - 1, j), result->profile.values[j], 1e-14);
}

TEST(Type3, StartsAgreeAndMethodsAgree) {
  Nonlinearity nl = Nonlinearity::arctan(4.0);
  Type3Result a = solve_type3_strip(nl, 8.0, 65, 17, 1e-10);
  Type3Result b = solve_type3_strip(nl, 8.0, 65, 17, 1e-10, {.start = Start::FromSuper});
  Type3Options cg;
  cg.solve.method = LinearMethod::ConjugateGradient;
  Type3Result c = solve_type3_strip(nl, 8.0, 65, 17, 1e-10, cg);
  EXPECT_LT(max_abs(a.u - b.u), 1e-8);
  EXPECT_LT(max_abs(a.u - c.u), 1e-8);
}

TEST(Type3, ShortStripWarnsAboutAttachment) {
  Type3Result r = solve_type3_strip(Nonlinearity::arctan(4.0), 2.0, 33, 17, 1e-10);
  EXPECT_TRUE(r.attachment_warning);
}

TEST(Type3, EvenNxIsRejected) {
  EXPECT_EQ(code_of([] { (void)solve_type3_strip(Nonlinearity::arctan(4.0), 12.0, 64, 17, 1e-10); }),
            ErrorCode::InvalidGrid);
}

TEST(Saddle, SymmetricPositiveAndStartIndependent) {
  Nonlinearity nl = Nonlinearity::allen_cahn();
  SaddleResult a = solve_saddle_quadrant(nl, 20.0, 81, 1e-10);
  SaddleResult b = solve_saddle_quadrant(nl, 20.0, 81, 1e-10, {.start = Start::FromSub});
  EXPECT_LT(a.diagonal_gap, 1e-9);
  EXPECT_LT(max_abs(a.quadrant - b.quadrant), 1e-8);
  const Grid& q = a.quadrant.grid();
  for (int j = 1; j < q.ny() - 1; ++j) {
    for (int i = 1; i < q.nx() - 1; ++i) {
      EXPECT_GT(a.quadrant(i, j), 0.0);
      EXPECT_LT(a.quadrant(i, j), 1.0);
    }
  }
  EXPECT_EQ(a.u.grid().kind(), DomainKind::HalfPlaneTruncation);
  EXPECT_LT(interior_max_abs(residual(a.u, nl)), 1e-9);
}

TEST(Saddle, NeedsAllenCahn) {
  EXPECT_EQ(code_of([] { (void)solve_saddle_quadrant(Nonlinearity::arctan(4.0), 20.0, 41, 1e-10); }),
            ErrorCode::InvalidArgument);
}
