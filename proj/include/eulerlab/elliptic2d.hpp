#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "errors.hpp"
#include "flows.hpp"
#include "grid.hpp"
#include "linear_solver.hpp"
#include "nonlinearity.hpp"
#include "oned.hpp"

namespace eulerlab {

struct ZeroFarField {};
struct ProfileFarField {
  Profile profile;
};
using TruncationBC = std::variant<ZeroFarField, ProfileFarField>;

/// -Lap u = f(u) on the grid interior with the boundary values of
/// `dirichlet`. `shift` <= 0 means "choose from the barriers".
struct EllipticProblem {
  Grid grid;
  Nonlinearity nl = Nonlinearity::zero();
  ScalarField dirichlet;
  TruncationBC truncation_bc = ZeroFarField{};
  double shift = 0.0;
  std::optional<ScalarField> lower_barrier;
  std::optional<ScalarField> upper_barrier;
};

struct StartField {
  Start kind = Start::FromSub;
  ScalarField field;
};

inline StartField from_sub(ScalarField f) { return {Start::FromSub, std::move(f)}; }
inline StartField from_super(ScalarField f) { return {Start::FromSuper, std::move(f)}; }

struct SolveReport {
  int iterations = 0;
  double final_residual = 0.0;
  double final_update = 0.0;
  int sandwich_violations = 0;
  bool monotone = true;
  double shift = 0.0;
  Start start = Start::FromSub;
  LinearMethod method = LinearMethod::SineTransform;
};

struct SolveOptions {
  LinearMethod method = LinearMethod::SineTransform;
  int max_iterations = 50000;
  /// Slack for the stencil check of the start field.
  double verify_tol = 1e-9;
};

struct SolveResult {
  ScalarField u;
  SolveReport report;
};

/// -Lap_h u - f(u) at interior nodes, zero on boundary nodes.
[[nodiscard]] inline ScalarField residual(const ScalarField& u, const Nonlinearity& nl) {
  const Grid& g = u.grid();
  ScalarField lap = laplacian(u);
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) continue;
      out(i, j) = -lap(i, j) - nl.f(u(i, j));
    }
  }
  return out;
}

/// max |f'| over [lo, hi] plus a 0.1 margin, so s -> f(s) + shift s is
/// increasing on the sandwich range.
[[nodiscard]] inline double default_shift(const Nonlinearity& nl, double lo, double hi) {
  return nl.max_abs_f_prime(std::min(lo, hi), std::max(lo, hi)) + 0.1;
}

/// eps sin(delta (x - h)) cos(pi y / (2 (1 - delta))) inside
/// E = (h, h + pi / delta) x (-(1 - delta), 1 - delta), zero elsewhere.
[[nodiscard]] inline ScalarField subsolution_strip(const Grid& grid, double eps, double delta, double h_offset) {
  require(delta > 0.0 && delta < 1.0, ErrorCode::InvalidArgument, "delta must lie in (0, 1)");
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  const double pi = std::numbers::pi;
  double x_lo = h_offset;
  double x_hi = h_offset + pi / delta;
  double y_half = 1.0 - delta;
  bool meets = x_hi > grid.x_range().lo && x_lo < grid.x_range().hi && y_half > grid.y_range().lo &&
               -y_half < grid.y_range().hi;
  require(meets, ErrorCode::BoxOutsideGrid, "subsolution box does not intersect the grid");
  return sample(grid, [&](double x, double y) {
    if (x <= x_lo || x >= x_hi || std::abs(y) >= y_half) return 0.0;
    double peak_x = x_lo + pi / (2.0 * delta);
    double sx = x == peak_x ? 1.0 : std::sin(delta * (x - x_lo));
    double cy = y == 0.0 ? 1.0 : std::cos(pi * y / (2.0 * y_half));
    return eps * sx * cy;
  });
}

/// eps sin(pi (x - a) / lx) sin(pi (y - c) / ly) on the open box
/// (a, a + lx) x (c, c + ly), zero elsewhere.
[[nodiscard]] inline ScalarField subsolution_box(const Grid& grid, double eps, Interval bx, Interval by) {
  require(eps > 0.0, ErrorCode::InvalidArgument, "eps must be positive");
  bool meets = bx.hi > grid.x_range().lo && bx.lo < grid.x_range().hi && by.hi > grid.y_range().lo &&
               by.lo < grid.y_range().hi;
  require(meets, ErrorCode::BoxOutsideGrid, "subsolution box does not intersect the grid");
  const double pi = std::numbers::pi;
  return sample(grid, [&](double x, double y) {
    if (x <= bx.lo || x >= bx.hi || y <= by.lo || y >= by.hi) return 0.0;
    return eps * std::sin(pi * (x - bx.lo) / bx.length()) * std::sin(pi * (y - by.lo) / by.length());
  });
}

namespace detail {

inline void verify_barrier(const ScalarField& s, const EllipticProblem& problem, Start kind, double tol) {
  const Grid& g = s.grid();
  bool sub = kind == Start::FromSub;
  ErrorCode code = sub ? ErrorCode::NotASubsolution : ErrorCode::NotASupersolution;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (!g.is_boundary(i, j)) continue;
      double gap = s(i, j) - problem.dirichlet(i, j);
      if ((sub && gap > tol) || (!sub && gap < -tol)) {
        fail(code, "boundary value " + std::to_string(s(i, j)) + " is on the wrong side of the Dirichlet data at (" +
                       std::to_string(g.x(i)) + ", " + std::to_string(g.y(j)) + ")");
      }
    }
  }
  ScalarField fixed = s;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) fixed(i, j) = problem.dirichlet(i, j);
    }
  }
  ScalarField r = residual(fixed, problem.nl);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) continue;
      double slack = tol * (1.0 + std::abs(problem.nl.f(fixed(i, j))));
      if ((sub && r(i, j) > slack) || (!sub && r(i, j) < -slack)) {
        fail(code, "stencil inequality fails by " + std::to_string(std::abs(r(i, j))) + " at (" +
                       std::to_string(g.x(i)) + ", " + std::to_string(g.y(j)) + ")");
      }
    }
  }
}

}  // namespace detail

/// Monotone sub/supersolution iteration
///   (-Lap_h + shift) u_{k+1} = f(u_k) + shift u_k,  u_{k+1} = data on the boundary,
/// started from a verified sub- or supersolution. Every sweep is checked for
/// monotonicity and for the sandwich against the start field and the
/// opposite barrier; convergence needs both the update and the residual
/// below tol.
[[nodiscard]] inline SolveResult solve_semilinear(const EllipticProblem& problem, const StartField& start,
                                                  double tol = 1e-8, const SolveOptions& options = {}) {
  const Grid& g = problem.grid;
  require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  require_same_grid(g, problem.dirichlet.grid(), "solve_semilinear");
  require_same_grid(g, start.field.grid(), "solve_semilinear");
  bool ascending = start.kind == Start::FromSub;
  const std::optional<ScalarField>& opposite = ascending ? problem.upper_barrier : problem.lower_barrier;
  if (opposite) {
    require_same_grid(g, opposite->grid(), "solve_semilinear");
    for (std::size_t k = 0; k < g.size(); ++k) {
      double gap = ascending ? start.field[k] - (*opposite)[k] : (*opposite)[k] - start.field[k];
      require(gap <= options.verify_tol, ErrorCode::InvalidArgument,
              "sub/supersolution ordering fails at node " + std::to_string(k));
    }
  }
  detail::verify_barrier(start.field, problem, start.kind, options.verify_tol);

  ScalarField u = start.field;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (g.is_boundary(i, j)) u(i, j) = problem.dirichlet(i, j);
    }
  }
  double lo = std::min(*std::min_element(u.values().begin(), u.values().end()),
                       opposite ? *std::min_element(opposite->values().begin(), opposite->values().end()) : 0.0);
  double hi = std::max(*std::max_element(u.values().begin(), u.values().end()),
                       opposite ? *std::max_element(opposite->values().begin(), opposite->values().end()) : 0.0);
  double shift = problem.shift > 0.0 ? problem.shift : default_shift(problem.nl, lo, hi);

  std::unique_ptr<SineTransformSolver> dst;
  if (options.method == LinearMethod::SineTransform) dst = std::make_unique<SineTransformSolver>(g, shift);
  double scale = 1.0 + std::max(std::abs(lo), std::abs(hi));
  double slack = (options.method == LinearMethod::SineTransform ? 1e-11 : 1e-9) * scale;

  SolveReport report;
  report.shift = shift;
  report.start = start.kind;
  report.method = options.method;
  ScalarField rhs(g);
  for (int it = 1; it <= options.max_iterations; ++it) {
    for (std::size_t k = 0; k < g.size(); ++k) rhs[k] = problem.nl.f(u[k]) + shift * u[k];
    ScalarField next = dst ? dst->solve(rhs, problem.dirichlet)
                           : linear_solve(g, shift, rhs, problem.dirichlet, LinearMethod::ConjugateGradient);
    double update = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      double step = next[k] - u[k];
      if ((ascending && step < -slack) || (!ascending && step > slack)) {
        report.monotone = false;
        fail(ErrorCode::NonConvergence, "monotone iteration lost monotonicity at sweep " + std::to_string(it) +
                                            " (step " + std::to_string(step) + ")");
      }
      bool below_start = ascending && next[k] < start.field[k] - slack && !g.is_boundary(
          static_cast<int>(k % g.nx()), static_cast<int>(k / g.nx()));
      bool above_start = !ascending && next[k] > start.field[k] + slack && !g.is_boundary(
          static_cast<int>(k % g.nx()), static_cast<int>(k / g.nx()));
      bool past_opposite = opposite && (ascending ? next[k] > (*opposite)[k] + slack : next[k] < (*opposite)[k] - slack);
      if (below_start || above_start || past_opposite) ++report.sandwich_violations;
      update = std::max(update, std::abs(step));
    }
    if (report.sandwich_violations > 0) {
      fail(ErrorCode::NonConvergence, "iterate left the sub/supersolution sandwich at sweep " + std::to_string(it));
    }
    u = std::move(next);
    report.iterations = it;
    report.final_update = update;
    if (update < tol) {
      double res = interior_max_abs(residual(u, problem.nl));
      report.final_residual = res;
      if (res < tol) return {std::move(u), report};
    }
  }
  report.final_residual = interior_max_abs(residual(u, problem.nl));
  fail(ErrorCode::NonConvergence, "monotone iteration did not converge in " + std::to_string(options.max_iterations) +
                                      " sweeps (update " + std::to_string(report.final_update) + ", residual " +
                                      std::to_string(report.final_residual) + ")");
}

enum class FarFieldMode { Profile, Zero };

struct Type3Options {
  Start start = Start::FromSub;
  FarFieldMode far_field = FarFieldMode::Profile;
  double delta = 0.05;
  SolveOptions solve{};
};

struct Type3Result {
  ScalarField u;
  ScalarField half;
  Profile profile;
  SolveReport report;
  double attachment_error = 0.0;
  bool attachment_warning = false;
  double evenness_gap = 0.0;
  double epsilon = 0.0;
};

/// Half-strip problem on (0, L) x (-1, 1): u = 0 on x = 0 and on the walls,
/// u = u_bar (or 0) on x = L. Also returns the barriers used.
struct HalfStripSetup {
  EllipticProblem problem;
  ScalarField sub;
  ScalarField super;
  Profile profile;
  double epsilon = 0.0;
  double delta = 0.0;
};

[[nodiscard]] inline HalfStripSetup make_half_strip(const Nonlinearity& nl, double L, int nx_half, int ny, double tol,
                                                    const Type3Options& options = {}) {
  require(nl.f(0.0) == 0.0, ErrorCode::InvalidArgument, "Type III solvers need f(0) = 0");
  require(L > 0.0, ErrorCode::InvalidArgument, "L must be positive");
  Grid half(nx_half, ny, {0.0, L}, {-1.0, 1.0}, DomainKind::StripTruncation);
  Profile bar = solve_strip_profile(nl, ny, std::min(tol, 1e-11));
  HalfStripSetup s;
  s.profile = bar;
  const double pi = std::numbers::pi;
  double delta = options.delta;
  if (options.far_field == FarFieldMode::Zero) delta = std::max(delta, pi / L);
  require(delta < 1.0, ErrorCode::InvalidArgument, "strip too short for the zero far-field mode");
  double c = pi * pi / (4.0 * (1.0 - delta) * (1.0 - delta)) + delta * delta;
  double eps = subsolution_amplitude(nl, c);
  bool profile_mode = options.far_field == FarFieldMode::Profile;

  ScalarField dirichlet(half);
  for (int j = 0; j < ny; ++j) dirichlet(nx_half - 1, j) = profile_mode ? bar.values[j] : 0.0;
  for (int i = 0; i < nx_half; ++i) {
    dirichlet(i, 0) = 0.0;
    dirichlet(i, ny - 1) = 0.0;
  }
  ScalarField super = sample(half, [&](double, double) { return 0.0; });
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx_half; ++i) super(i, j) = i == 0 ? 0.0 : bar.values[j];
  }
  // Zero far field: the constant profile still dominates the data.
  ScalarField sub = subsolution_strip(half, eps, delta, 0.0);
  for (;;) {
    bool ordered = true;
    for (int j = 0; j < ny && ordered; ++j) {
      for (int i = 0; i < nx_half; ++i) {
        if (sub(i, j) > super(i, j) || (half.is_boundary(i, j) && sub(i, j) > dirichlet(i, j) + 1e-12)) {
          ordered = false;
          break;
        }
      }
    }
    if (ordered) break;
    eps *= 0.5;
    require(eps > 1e-12, ErrorCode::NoSubsolution, "no strip subsolution fits under the data");
    sub = subsolution_strip(half, eps, delta, 0.0);
  }
  s.sub = sub;
  s.super = super;
  s.epsilon = eps;
  s.delta = delta;
  s.problem.grid = half;
  s.problem.nl = nl;
  s.problem.dirichlet = dirichlet;
  s.problem.truncation_bc = profile_mode ? TruncationBC{ProfileFarField{bar}} : TruncationBC{ZeroFarField{}};
  s.problem.lower_barrier = sub;
  s.problem.upper_barrier = super;
  s.problem.shift = default_shift(nl, 0.0, *std::max_element(bar.values.begin(), bar.values.end()));
  return s;
}

/// Type III stream function on (-L, L) x (-1, 1): solve on the half strip,
/// then extend oddly in x. nx (full grid) must be odd.
[[nodiscard]] inline Type3Result solve_type3_strip(const Nonlinearity& nl, double L, int nx, int ny, double tol,
                                                   const Type3Options& options = {}) {
  require(nx % 2 == 1, ErrorCode::InvalidGrid, "nx must be odd so that x = 0 is a grid column");
  int nx_half = (nx + 1) / 2;
  HalfStripSetup s = make_half_strip(nl, L, nx_half, ny, tol, options);
  StartField start = options.start == Start::FromSub ? from_sub(s.sub) : from_super(s.super);
  SolveResult solved = solve_semilinear(s.problem, start, tol, options.solve);

  Type3Result out;
  out.half = solved.u;
  out.report = solved.report;
  out.profile = s.profile;
  out.epsilon = s.epsilon;
  out.u = odd_extend_x1(solved.u, Parity::odd, DomainKind::StripTruncation);

  const Grid& hg = solved.u.grid();
  double x_probe = std::max(0.0, L - 1.0);
  double t = x_probe / hg.hx();
  int i0 = std::min(static_cast<int>(t), hg.nx() - 2);
  double w = t - i0;
  double sup_bar = *std::max_element(s.profile.values.begin(), s.profile.values.end());
  for (int j = 0; j < ny; ++j) {
    double value = (1.0 - w) * solved.u(i0, j) + w * solved.u(i0 + 1, j);
    out.attachment_error = std::max(out.attachment_error, std::abs(value - s.profile.values[j]));
  }
  out.attachment_warning = out.attachment_error >= 0.02 * sup_bar;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < hg.nx(); ++i) {
      out.evenness_gap = std::max(out.evenness_gap, std::abs(solved.u(i, j) - solved.u(i, ny - 1 - j)));
    }
  }
  return out;
}

struct SaddleOptions {
  Start start = Start::FromSuper;
  double delta = 0.05;
  SolveOptions solve{};
};

struct SaddleResult {
  ScalarField quadrant;
  ScalarField u;
  Profile profile;
  SolveReport report;
  double diagonal_gap = 0.0;
  double epsilon = 0.0;
};

struct QuadrantSetup {
  EllipticProblem problem;
  ScalarField sub;
  ScalarField super;
  Profile profile;
  double epsilon = 0.0;
};

[[nodiscard]] inline QuadrantSetup make_quadrant(const Nonlinearity& nl, double L, int n, double tol,
                                                 const SaddleOptions& options = {}) {
  require(nl.family() == Family::AllenCahn, ErrorCode::InvalidArgument, "the saddle solver needs AllenCahn");
  Grid q = Grid::quadrant(L, n);
  Profile g = solve_heteroclinic(nl, L, n, std::min(tol, 1e-11));
  QuadrantSetup s;
  s.profile = g;
  ScalarField dirichlet(q);
  for (int k = 0; k < n; ++k) {
    dirichlet(n - 1, k) = g.values[k];
    dirichlet(k, n - 1) = g.values[k];
  }
  dirichlet(n - 1, 0) = 0.0;
  dirichlet(0, n - 1) = 0.0;
  ScalarField super(q);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) super(i, j) = std::min(g.values[i], g.values[j]);
  }
  const double pi = std::numbers::pi;
  Interval box{0.25 * L, 0.75 * L};
  double c = 2.0 * pi * pi / (box.length() * box.length()) + options.delta * options.delta;
  double eps = subsolution_amplitude(nl, c);
  ScalarField sub = subsolution_box(q, eps, box, box);
  while (true) {
    bool ordered = true;
    for (std::size_t k = 0; k < q.size(); ++k) {
      if (sub[k] > super[k]) {
        ordered = false;
        break;
      }
    }
    if (ordered) break;
    eps *= 0.5;
    require(eps > 1e-12, ErrorCode::NoSubsolution, "no quadrant subsolution fits under the supersolution");
    sub = subsolution_box(q, eps, box, box);
  }
  s.sub = sub;
  s.super = super;
  s.epsilon = eps;
  s.problem.grid = q;
  s.problem.nl = nl;
  s.problem.dirichlet = dirichlet;
  s.problem.truncation_bc = ProfileFarField{g};
  s.problem.lower_barrier = sub;
  s.problem.upper_barrier = super;
  s.problem.shift = default_shift(nl, 0.0, 1.0);
  return s;
}

/// Saddle solution of -Lap u = u - u^3 on (0, L)^2 with u = 0 on the axes
/// and heteroclinic data on the far sides, extended oddly in x to the
/// half-plane truncation (-L, L) x (0, L).
[[nodiscard]] inline SaddleResult solve_saddle_quadrant(const Nonlinearity& nl, double L, int n, double tol,
                                                        const SaddleOptions& options = {}) {
  QuadrantSetup s = make_quadrant(nl, L, n, tol, options);
  StartField start = options.start == Start::FromSub ? from_sub(s.sub) : from_super(s.super);
  SolveResult solved = solve_semilinear(s.problem, start, tol, options.solve);
  SaddleResult out;
  out.quadrant = solved.u;
  out.report = solved.report;
  out.profile = s.profile;
  out.epsilon = s.epsilon;
  out.u = odd_extend_x1(solved.u, Parity::odd, DomainKind::HalfPlaneTruncation);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) out.diagonal_gap = std::max(out.diagonal_gap, std::abs(solved.u(i, j) - solved.u(j, i)));
  }
  return out;
}

}  // namespace eulerlab
