#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "nonlinearity.hpp"

namespace eulerlab {

enum class Start { FromSub, FromSuper };
enum class End { lower, upper };

constexpr std::string_view to_string(Start start) { return start == Start::FromSub ? "FromSub" : "FromSuper"; }

/// A solved 1D profile on a uniform node set over [a, b].
struct Profile {
  Interval interval{};
  std::vector<double> values;
  std::array<double, 2> boundary_derivatives{0.0, 0.0};
  double residual = 0.0;
  double update = 0.0;
  int iterations = 0;
  double epsilon = 0.0;
  double level = 0.0;
  double shift = 0.0;
  Start start = Start::FromSub;

  [[nodiscard]] int n() const { return static_cast<int>(values.size()); }
  [[nodiscard]] double h() const { return interval.length() / (n() - 1); }
  [[nodiscard]] double x(int k) const { return k == n() - 1 ? interval.hi : interval.lo + k * h(); }

  /// Piecewise-linear interpolation, clamped to the interval.
  [[nodiscard]] double at(double px) const {
    double t = std::clamp((px - interval.lo) / h(), 0.0, static_cast<double>(n() - 1));
    int k = std::min(static_cast<int>(t), n() - 2);
    double w = t - k;
    return (1.0 - w) * values[k] + w * values[k + 1];
  }
};

/// Wraps sampled data in a Profile (no solve) so shear profiles and test
/// functions can be passed where a Profile is expected.
template <class Fn>
Profile sample_profile(Interval interval, int n, Fn&& fn) {
  require(n >= 4, ErrorCode::InvalidArgument, "profile needs at least 4 nodes");
  Profile p;
  p.interval = interval;
  p.values.resize(n);
  for (int k = 0; k < n; ++k) p.values[k] = fn(p.x(k));
  return p;
}

/// One-sided second-order derivative at the requested end.
[[nodiscard]] inline double boundary_slope(const Profile& p, End end) {
  require(p.n() >= 3, ErrorCode::InvalidArgument, "profile too short for a boundary slope");
  const auto& u = p.values;
  double h = p.h();
  int n = p.n();
  if (end == End::lower) return (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
  return (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * h);
}

/// Largest eps <= eps_max with f(s) >= c s at sampled s in (0, eps].
[[nodiscard]] inline double subsolution_amplitude(const Nonlinearity& nl, double c, double eps_max = 1.0) {
  auto admissible = [&](double eps) {
    for (int k = 1; k <= 256; ++k) {
      double s = eps * k / 256.0;
      if (nl.f(s) < c * s) return false;
    }
    return true;
  };
  if (admissible(eps_max)) return eps_max;
  double lo = 1e-6 * eps_max;
  if (!admissible(lo)) {
    fail(ErrorCode::NoSubsolution, "f(s) >= " + std::to_string(c) + " s fails near s = 0 for " + nl.tag());
  }
  double hi = eps_max;
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    (admissible(mid) ? lo : hi) = mid;
  }
  return lo;
}

namespace detail {

/// Solves (-D2 + shift) w = rhs on interior nodes with w[0], w[n-1] fixed.
template <class Real>
void thomas_shifted(std::vector<Real>& w, const std::vector<Real>& rhs, Real h, Real shift) {
  int n = static_cast<int>(w.size());
  int m = n - 2;
  Real inv_h2 = Real(1) / (h * h);
  Real diag = Real(2) * inv_h2 + shift;
  Real off = -inv_h2;
  std::vector<Real> c(m), d(m);
  for (int k = 0; k < m; ++k) {
    Real r = rhs[k + 1];
    if (k == 0) r -= off * w[0];
    if (k == m - 1) r -= off * w[n - 1];
    Real denom = diag - (k > 0 ? off * c[k - 1] : Real(0));
    c[k] = off / denom;
    d[k] = (r - (k > 0 ? off * d[k - 1] : Real(0))) / denom;
  }
  for (int k = m - 1; k >= 0; --k) {
    w[k + 1] = d[k] - (k < m - 1 ? c[k] * w[k + 2] : Real(0));
  }
}

template <class Real>
Real residual_1d(const std::vector<Real>& u, Real h, const Nonlinearity& nl) {
  Real r = 0;
  int n = static_cast<int>(u.size());
  for (int k = 1; k < n - 1; ++k) {
    Real lap = (u[k - 1] - Real(2) * u[k] + u[k + 1]) / (h * h);
    r = std::max(r, std::abs(-lap - nl.f(u[k])));
  }
  return r;
}

struct Iteration1D {
  std::vector<long double> u;
  int iterations = 0;
  long double residual = 0;
  long double update = 0;
};

/// Monotone iteration (-D2 + L) u_{k+1} = f(u_k) + L u_k between barriers.
/// Ascending from a subsolution or descending from a supersolution; both
/// monotonicity and the sandwich are asserted every sweep.
inline Iteration1D monotone_iterate_1d(const Nonlinearity& nl, long double h, std::vector<long double> start,
                                       const std::vector<long double>& lower,
                                       const std::vector<long double>& upper, long double shift, double tol,
                                       bool ascending, int max_iterations) {
  int n = static_cast<int>(start.size());
  Iteration1D out;
  std::vector<long double> rhs(n), next(start);
  long double scale = 1;
  for (long double v : upper) scale = std::max(scale, std::abs(v));
  long double slack = 1e-14L * scale;
  for (int it = 1; it <= max_iterations; ++it) {
    for (int k = 0; k < n; ++k) rhs[k] = nl.f(start[k]) + shift * start[k];
    next.front() = start.front();
    next.back() = start.back();
    thomas_shifted(next, rhs, h, shift);
    long double update = 0;
    for (int k = 0; k < n; ++k) {
      long double step = next[k] - start[k];
      if ((ascending && step < -slack) || (!ascending && step > slack)) {
        fail(ErrorCode::NonConvergence, "monotone iteration lost monotonicity at sweep " + std::to_string(it));
      }
      if (next[k] < lower[k] - slack || next[k] > upper[k] + slack) {
        fail(ErrorCode::NonConvergence, "iterate left the sub/supersolution sandwich at sweep " + std::to_string(it));
      }
      update = std::max(update, std::abs(step));
    }
    start.swap(next);
    if (update < tol) {
      long double res = residual_1d(start, h, nl);
      if (res < tol) {
        out.u = std::move(start);
        out.iterations = it;
        out.residual = res;
        out.update = update;
        return out;
      }
    }
  }
  fail(ErrorCode::NonConvergence, "monotone iteration did not reach tolerance in " +
                                      std::to_string(max_iterations) + " sweeps");
}

inline void fill_report(Profile& p, const Iteration1D& it) {
  p.values.assign(it.u.begin(), it.u.end());
  p.iterations = it.iterations;
  p.residual = static_cast<double>(it.residual);
  p.update = static_cast<double>(it.update);
  p.boundary_derivatives = {boundary_slope(p, End::lower), boundary_slope(p, End::upper)};
}

}  // namespace detail

struct OneDOptions {
  Start start = Start::FromSub;
  double delta = 0.05;
  int max_iterations = 200000;
};

/// Positive solution of -u'' = f(u) on (-1, 1), u(+-1) = 0, squeezed between
/// eps cos(pi x / 2) and (M/2)(1 - x^2). Iterates in extended precision.
[[nodiscard]] inline Profile solve_strip_profile(const Nonlinearity& nl, int n, double tol,
                                                 const OneDOptions& options = {}) {
  require(n >= 5, ErrorCode::InvalidArgument, "profile needs at least 5 nodes");
  require(tol > 0.0, ErrorCode::InvalidArgument, "tolerance must be positive");
  require(nl.f(0.0) == 0.0, ErrorCode::InvalidArgument, "f(0) must vanish");
  const double pi = std::numbers::pi;
  double c = pi * pi / 4.0 + options.delta * options.delta;
  double eps = subsolution_amplitude(nl, c);
  double M = nl.bound_M();
  require(std::isfinite(M) && M > 0.0, ErrorCode::InvalidArgument, "strip profile needs a finite bound M");

  Profile p;
  p.interval = {-1.0, 1.0};
  p.values.assign(n, 0.0);
  long double h = 2.0L / (n - 1);
  std::vector<long double> sub(n), super(n);
  for (int k = 0; k < n; ++k) {
    long double x = k == n - 1 ? 1.0L : -1.0L + k * h;
    super[k] = 0.5L * M * (1.0L - x * x);
  }
  for (;;) {
    bool ordered = true;
    for (int k = 0; k < n; ++k) {
      long double x = k == n - 1 ? 1.0L : -1.0L + k * h;
      sub[k] = k == 0 || k == n - 1 ? 0.0L : eps * std::cos(std::numbers::pi_v<long double> * x / 2.0L);
      if (sub[k] > super[k]) ordered = false;
    }
    if (ordered) break;
    eps *= 0.5;
    require(eps > 1e-12, ErrorCode::NoSubsolution, "no subsolution below the supersolution");
  }
  double shift = nl.max_abs_f_prime(0.0, M / 2.0) + 0.1;
  bool ascending = options.start == Start::FromSub;
  auto it = detail::monotone_iterate_1d(nl, h, ascending ? sub : super, sub, super, shift, tol, ascending,
                                        options.max_iterations);
  detail::fill_report(p, it);
  p.epsilon = eps;
  p.level = M;
  p.shift = shift;
  p.start = options.start;
  return p;
}

/// Solution of -g'' = f(g) on [0, L] with g(0) = 0, g(L) = 1, between the
/// constant barriers 0 and 1.
[[nodiscard]] inline Profile solve_heteroclinic(const Nonlinearity& nl, double L, int n, double tol,
                                                const OneDOptions& options = {}) {
  require(n >= 5, ErrorCode::InvalidArgument, "profile needs at least 5 nodes");
  require(L > 1.0, ErrorCode::InvalidArgument, "truncation length must exceed 1");
  require(nl.f(0.0) == 0.0 && nl.f(1.0) == 0.0, ErrorCode::InvalidArgument,
          "heteroclinic solver needs f(0) = f(1) = 0");
  Profile p;
  p.interval = {0.0, L};
  long double h = static_cast<long double>(L) / (n - 1);
  std::vector<long double> sub(n, 0.0L), super(n, 1.0L);
  sub.back() = 1.0L;
  super.front() = 0.0L;
  double shift = nl.max_abs_f_prime(0.0, 1.0) + 0.1;
  bool ascending = options.start == Start::FromSub;
  auto it = detail::monotone_iterate_1d(nl, h, ascending ? sub : super, sub, super, shift, tol, ascending,
                                        options.max_iterations);
  detail::fill_report(p, it);
  p.epsilon = 0.0;
  p.level = 1.0;
  p.shift = shift;
  p.start = options.start;
  for (std::size_t k = 1; k < p.values.size(); ++k) {
    require(p.values[k] >= p.values[k - 1], ErrorCode::NonConvergence, "heteroclinic profile is not monotone");
  }
  double tail = std::abs(p.at(L) - p.at(L - 1.0));
  require(tail <= 1e-6, ErrorCode::BadTruncation,
          "|g(L) - g(L-1)| = " + std::to_string(tail) + " exceeds 1e-6; increase L");
  return p;
}

/// max - min of u'^2/2 + F(u) over the nodes, derivatives by centred
/// differences (one-sided at the ends).
[[nodiscard]] inline double energy_identity_spread(const Profile& p, const Nonlinearity& nl) {
  double lo = HUGE_VAL;
  double hi = -HUGE_VAL;
  int n = p.n();
  for (int k = 0; k < n; ++k) {
    double d = detail::diff1(p.values.data(), 1, n, k, p.h(), false);
    double e = 0.5 * d * d + nl.F(p.values[k]);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  return hi - lo;
}

}  // namespace eulerlab
