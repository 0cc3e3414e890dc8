#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "elliptic2d.hpp"
#include "errors.hpp"
#include "flows.hpp"
#include "grid.hpp"
#include "nonlinearity.hpp"
#include "oned.hpp"
#include "streamlines.hpp"

namespace eulerlab::acceptance {

struct Check {
  std::string label;
  bool pass = false;
  std::string measured;
  std::string expected;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;
  double budget = 0.0;
  std::string error;

  [[nodiscard]] bool pass() const {
    if (!error.empty()) return false;
    for (const Check& c : checks) {
      if (!c.pass) return false;
    }
    return seconds < budget;
  }
};

struct Options {
  /// Reduced resolutions.
  bool fast = false;
};

namespace detail {

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// |measured - expected| <= rel * |expected|
inline Check relative(std::string label, double measured, double expected, double rel) {
  double err = std::abs(measured - expected) / std::abs(expected);
  return {std::move(label), err <= rel, num(measured) + " (rel err " + num(err) + ")",
          num(expected) + " within " + num(100.0 * rel) + "%"};
}

inline Check at_most(std::string label, double measured, double bound) {
  return {std::move(label), measured <= bound, num(measured), "<= " + num(bound)};
}

inline Check at_least(std::string label, double measured, double bound) {
  return {std::move(label), measured >= bound, num(measured), ">= " + num(bound)};
}

inline Check within(std::string label, double measured, double lo, double hi) {
  return {std::move(label), measured >= lo && measured <= hi, num(measured), "in [" + num(lo) + ", " + num(hi) + "]"};
}

inline Check equals(std::string label, const std::string& measured, const std::string& expected) {
  return {std::move(label), measured == expected, measured, expected};
}

inline Check truth(std::string label, bool ok, std::string measured, std::string expected) {
  return {std::move(label), ok, std::move(measured), std::move(expected)};
}

struct Type3Case {
  Nonlinearity nl = Nonlinearity::arctan(4.0);
  Type3Result result;
  Flow flow;
};

inline Type3Case type3(int ny, double tol = 1e-10) {
  Type3Case c;
  int nx = 6 * (ny - 1) + 1;
  c.result = solve_type3_strip(c.nl, 12.0, nx, ny, tol);
  c.flow = flow_from_stream(c.result.u, c.nl);
  return c;
}

/// Slope of the strip profile at x2 = 1 from a fine independent 1D solve.
inline double strip_slope_oracle(const Nonlinearity& nl) {
  Profile p = solve_strip_profile(nl, 4001, 1e-11);
  return p.boundary_derivatives[1];
}

inline double observed_order(double coarse, double fine) { return std::log2(coarse / fine); }

}  // namespace detail

using detail::at_least;
using detail::at_most;
using detail::equals;
using detail::num;
using detail::relative;
using detail::truth;
using detail::within;

inline std::vector<Check> shear_triviality(const Options&) {
  std::vector<Check> out;
  Grid g = Grid::strip(12.0, 257, 65);
  for (AnalyticFlowName name : {AnalyticFlowName::Couette, AnalyticFlowName::Poiseuille, AnalyticFlowName::Kolmogorov}) {
    Flow f = analytic_flow(name, g);
    DiagnosticsReport r = analyze(f);
    std::string tag(to_string(name));
    out.push_back(at_most(tag + " total curvature", std::abs(r.total_curvature), 1e-12));
    out.push_back(equals(tag + " verdict", r.verdict.name(), "Shear"));
  }
  return out;
}

inline std::vector<Check> counterexample(const Options&) {
  std::vector<Check> out;
  AnalyticJet jet = eulerlab::detail::catalog_jet(AnalyticFlowName::ExponentialCounterexample);
  double worst = 0.0;
  for (int j = 0; j < 100; ++j) {
    for (int i = 0; i < 100; ++i) {
      double x = -1.0 + 2.0 * i / 99.0, y = -1.0 + 2.0 * j / 99.0;
      Vec2 r = analytic_momentum_residual(jet, x, y);
      Vec2 v = jet.velocity(x, y);
      double scale = 1.0 + v[0] * v[0] + v[1] * v[1];
      worst = std::max(worst, std::hypot(r[0], r[1]) / scale);
    }
  }
  out.push_back(at_most("analytic momentum residual at 1e4 points (relative)", worst, 1e-14));
  auto fd = [](int n) {
    Flow f = analytic_flow(AnalyticFlowName::ExponentialCounterexample, Grid(n, n, {-1.0, 1.0}, {-1.0, 1.0}));
    EulerResidual r = euler_residual(f);
    return std::max(interior_max_abs(r.momentum.first()), interior_max_abs(r.momentum.second()));
  };
  double coarse = fd(128), fine = fd(256);
  out.push_back(within("FD residual ratio 128^2 / 256^2", coarse / fine, 3.0, 5.0));
  return out;
}

inline std::vector<Check> sign_example(const Options&) {
  Grid g = Grid::strip(12.0, 257, 65);
  ScalarField u = sample(g, [](double, double y) { return 0.5 * y * std::abs(y); });
  ScalarField res = residual(u, Nonlinearity::sign(-1.0));
  double worst = max_abs_where(res, [&](int i, int j) {
    return !g.is_boundary(i, j) && std::abs(g.y(j)) >= 2.0 * g.hy() - 1e-12;
  });
  return {at_most("max |Lap_h u - sgn(u)| on |x2| >= 2h", worst, 1e-12)};
}

inline std::vector<Check> oned(const Options&) {
  std::vector<Check> out;
  Nonlinearity nl = Nonlinearity::arctan(4.0);
  OneDOptions sub_opts, super_opts;
  super_opts.start = Start::FromSuper;
  Profile a = solve_strip_profile(nl, 2001, 1e-11, sub_opts);
  Profile b = solve_strip_profile(nl, 2001, 1e-11, super_opts);
  out.push_back(at_most("residual (sub start)", a.residual, 1e-10));
  out.push_back(at_most("residual (super start)", b.residual, 1e-10));
  double diff = 0.0;
  for (int k = 0; k < a.n(); ++k) diff = std::max(diff, std::abs(a.values[k] - b.values[k]));
  out.push_back(at_most("sub vs super start", diff, 1e-8));
  std::string raised = "none";
  try {
    (void)solve_strip_profile(Nonlinearity::arctan(2.0), 2001, 1e-11);
  } catch (const Error& e) {
    raised = std::string(to_string(e.code()));
  }
  out.push_back(equals("lambda = 2", raised, "NoSubsolution"));
  return out;
}

inline std::vector<Check> type3_strip(const Options& opt) {
  std::vector<Check> out;
  detail::Type3Case c = detail::type3(opt.fast ? 65 : 129);
  const Flow& f = c.flow;
  const Grid& g = f.grid;
  AnalyzeOptions ao;
  ao.R_list = {4.0, 6.0, 8.0};
  DiagnosticsReport r = analyze(f, ao);

  out.push_back(equals("(a) verdict", r.verdict.name(), "TypeIIIUpper"));
  int n = r.angles.n_bins, empty_upper = 0, full_lower = 0;
  for (int bin = n / 2 - 1; bin <= n - 1; ++bin) empty_upper += r.angles.occupied[bin] ? 0 : 1;
  for (int bin : interior_lower_bins(n)) full_lower += r.angles.occupied[bin] ? 1 : 0;
  out.push_back(at_most("(a) empty upper-semicircle bins", empty_upper, 0));
  out.push_back(at_most("(a) occupied open-lower bins", full_lower, 0));

  double a = detail::strip_slope_oracle(c.nl);
  out.push_back(relative("(b) total curvature vs pi u'(1)^2", r.total_curvature, std::numbers::pi * a * a, 0.03));

  double trace8 = r.J_inf_trace.back().second;
  out.push_back(relative("(c) |J signed| vs wall trace at R = 8", std::abs(r.J_inf_signed), std::abs(trace8), 0.05));

  out.push_back(at_most("(d) lower-bound gap", std::abs(r.lower_bound_gap), 1e-6 * (1.0 + r.total_curvature)));

  out.push_back(at_most("(e) boundary asymptotics defect", boundary_asymptotics_gap(*r.walls), 0.02));
  const WallLimits& w = *r.walls;
  auto sq = [](double v) { return v * std::abs(v); };
  double from_walls = std::numbers::pi / 4.0 *
                      (sq(*w.upper_plus) - sq(*w.upper_minus) + sq(w.lower_minus) - sq(w.lower_plus));
  out.push_back(relative("(e) total curvature vs wall limits", r.total_curvature, from_walls, 0.03));

  ScalarField ux = d_dx(c.result.u);
  double min_ux = *std::min_element(ux.values().begin(), ux.values().end());
  out.push_back(at_least("(f) min du/dx1", min_ux, -1e-8));
  double odd_gap = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) odd_gap = std::max(odd_gap, std::abs(c.result.u(i, j) + c.result.u(g.nx() - 1 - i, j)));
  }
  out.push_back(at_most("(f) odd symmetry gap in x1", odd_gap, 1e-6));
  out.push_back(at_most("(f) even symmetry gap in x2", c.result.evenness_gap, 1e-6));
  return out;
}

inline std::vector<Check> half_plane(const Options& opt) {
  std::vector<Check> out;
  Nonlinearity nl = Nonlinearity::allen_cahn();
  int n = opt.fast ? 161 : 321;
  SaddleResult s = solve_saddle_quadrant(nl, 20.0, n, 1e-10);
  Flow f = flow_from_stream(s.u, nl);
  const Grid& g = f.grid;
  // v1(x, 0) -> -+g'(0) as x -> +-inf with g'(0) = 1/sqrt(2).
  double slope = 1.0 / std::sqrt(2.0);
  double expected = std::numbers::pi / 4.0 * 2.0 * slope * slope;
  double tc = total_curvature(f);
  out.push_back(relative("total curvature vs pi/4", tc, expected, 0.05));
  double rise = -1e300;
  for (int i = 0; i + 1 < g.nx(); ++i) {
    rise = std::max(rise, f.velocity.u_values()[g.index(i + 1, 0)] - f.velocity.u_values()[g.index(i, 0)]);
  }
  out.push_back(at_most("max increase of v1 along the wall", rise, 1e-8));
  StagnationReport st = stagnation_points(f);
  bool one = st.points.size() == 1 && st.degenerate.empty();
  double dist = one ? std::hypot(st.points[0].x, st.points[0].y) : 1e300;
  out.push_back(truth("stagnation points", one,
                      std::to_string(st.points.size()) + " points, " + std::to_string(st.degenerate.size()) + " sets",
                      "1 point, 0 sets"));
  out.push_back(at_most("stagnation point distance to origin", dist, 2.0 * g.h_min()));
  DiagnosticsReport r = analyze(f);
  out.push_back(equals("verdict", r.verdict.name(), "TypeIIIUpper"));
  return out;
}

inline std::vector<Check> equal_distribution(const Options& opt) {
  std::vector<Check> out;
  Flow tg = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(opt.fast ? 256 : 512));
  CurvatureProfile k = kappa_distribution(tg, 64);
  double tc = total_curvature(tg);
  out.push_back(at_most("TaylorGreen bin-mass CV", coefficient_of_variation(k.bin_mass), 0.05));
  double mean = k.total / k.n_bins;
  out.push_back(relative("TaylorGreen mean bin mass vs TC/64", mean, tc / 64.0, 0.01));
  detail::Type3Case c = detail::type3(opt.fast ? 65 : 129);
  CurvatureProfile kt = kappa_distribution(c.flow, 64);
  out.push_back(at_most("Type III upper-bin CV", coefficient_of_variation(select(kt.bin_mass, interior_upper_bins(64))), 0.08));
  double lower = 0.0;
  for (double m : select(kt.bin_mass, interior_lower_bins(64))) lower += m;
  out.push_back(at_most("Type III open-lower mass fraction", lower / kt.total, 0.01));
  return out;
}

inline std::vector<Check> strict_inequality(const Options& opt) {
  Flow tg = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(opt.fast ? 256 : 512));
  double tc = total_curvature(tg);
  double j = signed_curvature_integral(tg);
  double bound = 2.0 / std::numbers::pi * tc;
  return {at_least("(2/pi) TC - |J signed| over (2/pi) TC", (bound - std::abs(j)) / bound, 0.1)};
}

inline std::vector<Check> identity_chain(const Options& opt) {
  std::vector<Check> out;
  const double fraction = AnalyzeOptions{}.identity_speed_fraction;
  auto tg = [&](int n) {
    Flow f = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(n));
    return identity_residual_max(f, curvature_identity_residual(f), fraction);
  };
  int n0 = opt.fast ? 128 : 256;
  double c0 = tg(n0), c1 = tg(2 * n0);
  out.push_back(within("TaylorGreen observed order " + std::to_string(n0) + " -> " + std::to_string(2 * n0),
                       detail::observed_order(c0, c1), 1.5, 2.5));
  auto t3 = [&](int ny) {
    detail::Type3Case c = detail::type3(ny);
    return identity_residual_max(c.flow, curvature_identity_residual(c.flow), fraction);
  };
  int m0 = opt.fast ? 33 : 65;
  double d0 = t3(m0), d1 = t3(2 * m0 - 1);
  out.push_back(within("Type III observed order ny " + std::to_string(m0) + " -> " + std::to_string(2 * m0 - 1),
                       detail::observed_order(d0, d1), 1.5, 2.5));
  AnalyticJet jet = eulerlab::detail::catalog_jet(AnalyticFlowName::ExponentialCounterexample);
  double worst = 0.0;
  for (int j = 0; j < 100; ++j) {
    for (int i = 0; i < 100; ++i) {
      double x = -1.0 + 2.0 * i / 99.0, y = -1.0 + 2.0 * j / 99.0;
      Vec2 v = jet.velocity(x, y);
      double scale = 1.0 + v[0] * v[0] + v[1] * v[1];
      worst = std::max(worst, curvature_identity_residual_analytic(jet, x, y) / scale);
    }
  }
  out.push_back(at_most("exponential flow closed-form discrepancy (relative)", worst, 1e-13));
  return out;
}

inline std::vector<Check> stability(const Options&) {
  std::vector<Check> out;
  Grid g = Grid::strip(12.0, 257, 65);
  auto profile = [&](auto fn) { return sample_profile(g.y_range(), g.ny(), fn); };
  Profile sq = profile([](double y) { return y * y; });
  Profile lin = profile([](double y) { return y; });
  StabilityMargin p = stability_margin(analytic_flow(AnalyticFlowName::Poiseuille, g), sq, MarginMode::VorticityGradient);
  out.push_back(relative("Poiseuille vs x2^2 margin", p.value, 2.0, 1e-8));
  out.push_back(truth("Poiseuille applicable", p.applicable, p.applicable ? "true" : "false", "true"));
  StabilityMargin c = stability_margin(analytic_flow(AnalyticFlowName::Couette, g), lin, MarginMode::VorticityGradient);
  out.push_back(truth("Couette vs x2 inapplicable", !c.applicable, c.applicable ? "applicable" : "inapplicable",
                      "inapplicable"));
  StabilityMargin k = stability_margin(analytic_flow(AnalyticFlowName::Kolmogorov, g), sq, MarginMode::VorticityGradient);
  out.push_back(truth("Kolmogorov vs x2^2 margin negative", k.value < 0.0, num(k.value), "< 0"));
  return out;
}

inline std::vector<Check> invariance(const Options& opt) {
  std::vector<Check> out;
  const double alpha = 0.7;
  Flow tg = analytic_flow(AnalyticFlowName::TaylorGreen, Grid::torus(opt.fast ? 128 : 256));
  Flow rot = rotated_samples(tg, alpha);
  double floor = stagnation_floor(tg);
  AngleSet a = angle_set(rot, floor, 360);
  std::vector<double> expected(360, 0.0);
  for (std::size_t k = 0; k < tg.grid.size(); ++k) {
    double s = tg.velocity.norm(k);
    if (s <= floor) continue;
    double th = flow_angle(tg.velocity.u_values()[k], tg.velocity.v_values()[k]) + alpha;
    if (th > std::numbers::pi) th -= 2.0 * std::numbers::pi;
    expected[angle_bin(th, 360)] += s;
  }
  double l1 = 0.0, total = 0.0;
  for (int b = 0; b < 360; ++b) {
    l1 += std::abs(a.mass[b] - expected[b]);
    total += expected[b];
  }
  out.push_back(at_most("rotated AngleSet vs shifted bins (relative L1)", l1 / total, 1e-3));
  double tc = total_curvature(tg), tc_rot = total_curvature(rot);
  out.push_back(relative("TC under rotation", tc_rot, tc, 1e-6));
  Grid strip = Grid::strip(12.0, 257, 65);
  std::vector<Flow> flows{tg, analytic_flow(AnalyticFlowName::Poiseuille, strip),
                          analytic_flow(AnalyticFlowName::ExponentialCounterexample, Grid(129, 129, {-1.0, 1.0}, {-1.0, 1.0})),
                          detail::type3(opt.fast ? 33 : 65).flow};
  for (const Flow& f : flows) {
    Flow big = scaled(f, 3.0);
    DiagnosticsReport r0 = analyze(f), r1 = analyze(big);
    std::string tag = f.provenance.tag.empty() ? "flow" : f.provenance.tag;
    if (r0.total_curvature > 0.0) {
      out.push_back(relative(tag + " TC ratio under c = 3", r1.total_curvature / r0.total_curvature, 9.0, 1e-8));
    } else {
      out.push_back(at_most(tag + " TC under c = 3", std::abs(r1.total_curvature), 1e-12));
    }
    out.push_back(equals(tag + " verdict under c = 3", r1.verdict.name(), r0.verdict.name()));
  }
  return out;
}

struct Criterion {
  int id;
  std::string title;
  std::string suite;
  double budget;
  std::function<std::vector<Check>(const Options&)> run;
};

inline const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "shear triviality", "shear", 1.0, shear_triviality},
      {2, "exponential counterexample", "counterexample", 5.0, counterexample},
      {3, "sign-equation example", "example", 1.0, sign_example},
      {4, "1D strip profile", "oned", 1.0, oned},
      {5, "Type III strip flow", "type3", 60.0, type3_strip},
      {6, "half-plane saddle flow", "halfplane", 90.0, half_plane},
      {7, "equal distribution", "distribution", 30.0, equal_distribution},
      {8, "strict inequality for full-circle flows", "strict", 10.0, strict_inequality},
      {9, "curvature identity chain", "identities", 20.0, identity_chain},
      {10, "stability margin", "margin", 1.0, stability},
      {11, "invariance", "invariance", 10.0, invariance},
  };
  return list;
}

[[nodiscard]] inline std::vector<std::string> suite_names() {
  std::vector<std::string> out{"all"};
  for (const Criterion& c : criteria()) out.push_back(c.suite);
  return out;
}

[[nodiscard]] inline CriterionResult run_one(const Criterion& c, const Options& options) {
  CriterionResult r;
  r.id = c.id;
  r.title = c.title;
  r.budget = c.budget;
  auto t0 = std::chrono::steady_clock::now();
  try {
    r.checks = c.run(options);
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

/// Runs the criteria of `suite` ("all" or a suite name) in order, calling
/// report after each one.
inline std::vector<CriterionResult> run(const std::string& suite, const Options& options,
                                        const std::function<void(const CriterionResult&)>& report = {}) {
  std::vector<std::string> names = suite_names();
  require(std::find(names.begin(), names.end(), suite) != names.end(), ErrorCode::InvalidArgument,
          "unknown suite '" + suite + "'");
  std::vector<CriterionResult> out;
  for (const Criterion& c : criteria()) {
    if (suite != "all" && suite != c.suite) continue;
    out.push_back(run_one(c, options));
    if (report) report(out.back());
  }
  return out;
}

[[nodiscard]] inline std::string summary_line(const CriterionResult& r) {
  std::string s = std::string(r.pass() ? "PASS" : "FAIL") + " [" + std::to_string(r.id) + "] " + r.title + ":";
  for (const Check& c : r.checks) {
    if (!c.pass) s += " FAILED{" + c.label + ": " + c.measured + ", expected " + c.expected + "}";
  }
  if (!r.error.empty()) s += " error{" + r.error + "}";
  int passed = 0;
  for (const Check& c : r.checks) passed += c.pass ? 1 : 0;
  s += " " + std::to_string(passed) + "/" + std::to_string(r.checks.size()) + " checks, " + num(r.seconds) + " s (budget " +
       num(r.budget) + " s)";
  return s;
}

[[nodiscard]] inline std::string check_line(const Check& c) {
  return std::string("  ") + (c.pass ? "ok   " : "FAIL ") + c.label + ": " + c.measured + " (expected " + c.expected + ")";
}

}  // namespace eulerlab::acceptance
