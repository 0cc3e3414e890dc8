#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "flows.hpp"
#include "grid.hpp"
#include "oned.hpp"

namespace eulerlab {

/// Signed angle from the unit vector e to u, in (-pi, pi]. The zero vector
/// has angle 0; directions opposite to e have angle +pi.
[[nodiscard]] inline double angle_from(Vec2 e, Vec2 u) {
  require(std::abs(std::hypot(e[0], e[1]) - 1.0) <= 1e-12, ErrorCode::NonUnitReference,
          "reference direction must be a unit vector");
  double norm = std::hypot(u[0], u[1]);
  if (norm == 0.0) return 0.0;
  double c = std::clamp((u[0] * e[0] + u[1] * e[1]) / norm, -1.0, 1.0);
  double s = u[0] * -e[1] + u[1] * e[0];
  double a = std::acos(c);
  if (s > 0.0) return a;
  if (s < 0.0) return -a;
  return c < 0.0 ? std::numbers::pi : 0.0;
}

/// Angle from (1, 0), without the reference check.
[[nodiscard]] inline double flow_angle(double v1, double v2) {
  if (v2 == 0.0) return v1 < 0.0 ? std::numbers::pi : 0.0;
  return std::atan2(v2, v1);
}

/// Bin b covers (-pi + b w, -pi + (b + 1) w] with w = 2 pi / n.
[[nodiscard]] inline int angle_bin(double theta, int n_bins) {
  const double pi = std::numbers::pi;
  double w = 2.0 * pi / n_bins;
  int b = static_cast<int>(std::ceil((theta + pi) / w)) - 1;
  return std::clamp(b, 0, n_bins - 1);
}

struct AngleSet {
  int n_bins = 360;
  std::vector<bool> occupied;
  std::vector<double> mass;
  double stagnation_threshold = 0.0;

  [[nodiscard]] double bin_width() const { return 2.0 * std::numbers::pi / n_bins; }
  [[nodiscard]] double bin_center(int b) const { return -std::numbers::pi + (b + 0.5) * bin_width(); }
  [[nodiscard]] int count_occupied() const { return static_cast<int>(std::count(occupied.begin(), occupied.end(), true)); }
};

struct VelocityGradients {
  VectorField grad_v1;
  VectorField grad_v2;
};

[[nodiscard]] inline VelocityGradients velocity_gradients(const Flow& flow) {
  return {gradient(flow.velocity.first()), gradient(flow.velocity.second())};
}

/// max(1e-10, 1e-3 h max |grad v|) with h the smaller spacing.
[[nodiscard]] inline double stagnation_floor(const Flow& flow, const VelocityGradients& d) {
  double m = 0.0;
  for (std::size_t k = 0; k < flow.grid.size(); ++k) {
    double a = d.grad_v1.u_values()[k], b = d.grad_v1.v_values()[k];
    double c = d.grad_v2.u_values()[k], e = d.grad_v2.v_values()[k];
    m = std::max(m, std::sqrt(a * a + b * b + c * c + e * e));
  }
  return std::max(1e-10, 1e-3 * flow.grid.h_min() * m);
}

[[nodiscard]] inline double stagnation_floor(const Flow& flow) { return stagnation_floor(flow, velocity_gradients(flow)); }

[[nodiscard]] inline AngleSet angle_set(const Flow& flow, double threshold, int n_bins = 360) {
  require(threshold > 0.0, ErrorCode::InvalidArgument, "stagnation threshold must be positive");
  require(n_bins >= 4 && n_bins % 2 == 0, ErrorCode::InvalidArgument, "n_bins must be even and at least 4");
  AngleSet out;
  out.n_bins = n_bins;
  out.occupied.assign(n_bins, false);
  out.mass.assign(n_bins, 0.0);
  out.stagnation_threshold = threshold;
  const auto& v1 = flow.velocity.u_values();
  const auto& v2 = flow.velocity.v_values();
  for (std::size_t k = 0; k < v1.size(); ++k) {
    double speed = std::hypot(v1[k], v2[k]);
    if (speed <= threshold) continue;
    int b = angle_bin(flow_angle(v1[k], v2[k]), n_bins);
    out.occupied[b] = true;
    out.mass[b] += speed;
  }
  return out;
}

/// |v1 grad v2 - v2 grad v1|^2 / |v|^2, zero where |v| <= floor.
[[nodiscard]] inline ScalarField curvature_density(const Flow& flow, const VelocityGradients& d, double floor) {
  ScalarField out(flow.grid);
  const auto& v1 = flow.velocity.u_values();
  const auto& v2 = flow.velocity.v_values();
  for (std::size_t k = 0; k < v1.size(); ++k) {
    double s2 = v1[k] * v1[k] + v2[k] * v2[k];
    if (std::sqrt(s2) <= floor) continue;
    double cx = v1[k] * d.grad_v2.u_values()[k] - v2[k] * d.grad_v1.u_values()[k];
    double cy = v1[k] * d.grad_v2.v_values()[k] - v2[k] * d.grad_v1.v_values()[k];
    out[k] = (cx * cx + cy * cy) / s2;
  }
  return out;
}

[[nodiscard]] inline ScalarField curvature_density(const Flow& flow) {
  VelocityGradients d = velocity_gradients(flow);
  return curvature_density(flow, d, stagnation_floor(flow, d));
}

using NodeMask = std::function<bool(int, int)>;

/// Nodal: trapezoid over the nodes. CellMidpoint: S x S midpoints per cell
/// of the bilinear interpolants of v and of the nodal gradients, which
/// resolves layers where |v| nearly vanishes between nodes.
enum class CurvatureQuadrature { Nodal, CellMidpoint };

struct QuadratureRule {
  CurvatureQuadrature kind = CurvatureQuadrature::CellMidpoint;
  int subsamples = 8;
};

namespace detail {

inline double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

/// sgn(v2) per node; nodes with v2 = 0 take the sign of the mean of the
/// signs of their y-neighbours (so wall rows follow the adjacent interior).
inline std::vector<double> v2_signs(const Flow& flow) {
  const Grid& g = flow.grid;
  const auto& v2 = flow.velocity.v_values();
  std::vector<double> s(v2.size());
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      std::size_t k = g.index(i, j);
      if (v2[k] != 0.0) {
        s[k] = sgn(v2[k]);
        continue;
      }
      double acc = 0.0;
      if (j > 0) acc += sgn(v2[g.index(i, j - 1)]);
      if (j < g.ny() - 1) acc += sgn(v2[g.index(i, j + 1)]);
      s[k] = sgn(acc);
    }
  }
  return s;
}

struct CurvatureSample {
  int i = 0;
  int j = 0;
  double v1 = 0.0;
  double v2 = 0.0;
  double sign_v2 = 0.0;
  double mass = 0.0;
};

/// Calls fn once per quadrature point with |v| above the floor. (i, j) is the
/// nearest node, mass the weighted density.
template <class Fn>
void for_each_curvature_sample(const Flow& flow, const VelocityGradients& d, double floor, QuadratureRule rule,
                               Fn&& fn) {
  const Grid& g = flow.grid;
  const double* field[6] = {flow.velocity.u_values().data(), flow.velocity.v_values().data(),
                            d.grad_v1.u_values().data(),     d.grad_v1.v_values().data(),
                            d.grad_v2.u_values().data(),     d.grad_v2.v_values().data()};
  auto density = [](const double* q) {
    double s2 = q[0] * q[0] + q[1] * q[1];
    double cx = q[0] * q[4] - q[1] * q[2];
    double cy = q[0] * q[5] - q[1] * q[3];
    return (cx * cx + cy * cy) / s2;
  };
  if (rule.kind == CurvatureQuadrature::Nodal) {
    std::vector<double> signs = v2_signs(flow);
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) {
        std::size_t k = g.index(i, j);
        double q[6];
        for (int m = 0; m < 6; ++m) q[m] = field[m][k];
        if (std::hypot(q[0], q[1]) <= floor) continue;
        fn(CurvatureSample{i, j, q[0], q[1], signs[k], quadrature_weight(g, i, j) * density(q)});
      }
    }
    return;
  }
  int S = rule.subsamples;
  require(S >= 1, ErrorCode::InvalidArgument, "subsamples must be at least 1");
  int cells_x = g.periodic_x() ? g.nx() : g.nx() - 1;
  int cells_y = g.periodic_y() ? g.ny() : g.ny() - 1;
  double weight = g.hx() * g.hy() / (static_cast<double>(S) * S);
  for (int j = 0; j < cells_y; ++j) {
    int j1 = (j + 1) % g.ny();
    for (int i = 0; i < cells_x; ++i) {
      int i1 = (i + 1) % g.nx();
      std::size_t k00 = g.index(i, j), k10 = g.index(i1, j), k01 = g.index(i, j1), k11 = g.index(i1, j1);
      for (int b = 0; b < S; ++b) {
        double t = (b + 0.5) / S;
        int nj = t < 0.5 ? j : j1;
        for (int a = 0; a < S; ++a) {
          double s = (a + 0.5) / S;
          double w00 = (1 - s) * (1 - t), w10 = s * (1 - t), w01 = (1 - s) * t, w11 = s * t;
          double q[6];
          for (int m = 0; m < 6; ++m) {
            const double* f = field[m];
            q[m] = w00 * f[k00] + w10 * f[k10] + w01 * f[k01] + w11 * f[k11];
          }
          if (std::hypot(q[0], q[1]) <= floor) continue;
          fn(CurvatureSample{s < 0.5 ? i : i1, nj, q[0], q[1], sgn(q[1]), weight * density(q)});
        }
      }
    }
  }
}

}  // namespace detail

/// Integral of |v1 grad v2 - v2 grad v1|^2 / |v|^2, optionally restricted to
/// quadrature points whose nearest node lies in region.
[[nodiscard]] inline double total_curvature(const Flow& flow, const NodeMask& region = {}, QuadratureRule rule = {}) {
  VelocityGradients d = velocity_gradients(flow);
  double total = 0.0;
  detail::for_each_curvature_sample(flow, d, stagnation_floor(flow, d), rule, [&](const detail::CurvatureSample& p) {
    if (!region || region(p.i, p.j)) total += p.mass;
  });
  return total;
}

/// (2/pi) * integral of sgn(v2) |v1 grad v2 - v2 grad v1|^2 / |v|^2.
[[nodiscard]] inline double signed_curvature_integral(const Flow& flow, QuadratureRule rule = {}) {
  VelocityGradients d = velocity_gradients(flow);
  double total = 0.0;
  detail::for_each_curvature_sample(flow, d, stagnation_floor(flow, d), rule,
                                    [&](const detail::CurvatureSample& p) { total += p.sign_v2 * p.mass; });
  return 2.0 / std::numbers::pi * total;
}

/// Four expressions of the curvature density, nodewise.
struct CurvatureForms {
  ScalarField gradient_gap;    // |grad v|^2 - |grad |v||^2
  ScalarField direction;       // |v|^2 |grad (v/|v|)|^2
  ScalarField cross;           // |v1 grad v2 - v2 grad v1|^2 / |v|^2
  std::optional<ScalarField> pressure;  // |grad P|^2 / |v|^2
  double floor = 0.0;
};

[[nodiscard]] inline CurvatureForms curvature_forms(const Flow& flow) {
  const Grid& g = flow.grid;
  VelocityGradients d = velocity_gradients(flow);
  CurvatureForms out;
  out.floor = stagnation_floor(flow, d);
  out.cross = curvature_density(flow, d, out.floor);
  const auto& v1 = flow.velocity.u_values();
  const auto& v2 = flow.velocity.v_values();
  ScalarField speed(g), n1(g), n2(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    speed[k] = std::hypot(v1[k], v2[k]);
    if (speed[k] > 0.0) {
      n1[k] = v1[k] / speed[k];
      n2[k] = v2[k] / speed[k];
    }
  }
  VectorField gs = gradient(speed);
  VectorField gn1 = gradient(n1);
  VectorField gn2 = gradient(n2);
  std::optional<VectorField> gp;
  if (flow.pressure) gp = gradient(*flow.pressure);
  out.gradient_gap = ScalarField(g);
  out.direction = ScalarField(g);
  if (gp) out.pressure = ScalarField(g);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (speed[k] <= out.floor) continue;
    auto sq = [](double a, double b) { return a * a + b * b; };
    double grad_v = sq(d.grad_v1.u_values()[k], d.grad_v1.v_values()[k]) +
                    sq(d.grad_v2.u_values()[k], d.grad_v2.v_values()[k]);
    out.gradient_gap[k] = grad_v - sq(gs.u_values()[k], gs.v_values()[k]);
    out.direction[k] = speed[k] * speed[k] *
                       (sq(gn1.u_values()[k], gn1.v_values()[k]) + sq(gn2.u_values()[k], gn2.v_values()[k]));
    if (gp) (*out.pressure)[k] = sq(gp->u_values()[k], gp->v_values()[k]) / (speed[k] * speed[k]);
  }
  return out;
}

/// Nodewise max pairwise discrepancy among the available forms; zero where
/// |v| <= floor.
[[nodiscard]] inline ScalarField curvature_identity_residual(const Flow& flow) {
  CurvatureForms f = curvature_forms(flow);
  ScalarField out(flow.grid);
  for (std::size_t k = 0; k < flow.grid.size(); ++k) {
    double vals[4] = {f.gradient_gap[k], f.direction[k], f.cross[k], f.pressure ? (*f.pressure)[k] : 0.0};
    int count = f.pressure ? 4 : 3;
    double lo = *std::min_element(vals, vals + count);
    double hi = *std::max_element(vals, vals + count);
    out[k] = hi - lo;
  }
  return out;
}

/// The same discrepancy from closed-form derivatives at one point.
[[nodiscard]] inline double curvature_identity_residual_analytic(const AnalyticJet& jet, double x, double y) {
  Vec2 v = jet.velocity(x, y);
  Jacobian d = jet.jacobian(x, y);
  Vec2 gp = jet.pressure_gradient(x, y);
  double s2 = v[0] * v[0] + v[1] * v[1];
  double s = std::sqrt(s2);
  if (s == 0.0) return 0.0;
  double grad_v = d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3];
  double gsx = (v[0] * d[0] + v[1] * d[2]) / s;
  double gsy = (v[0] * d[1] + v[1] * d[3]) / s;
  double a = grad_v - (gsx * gsx + gsy * gsy);
  double n1x = d[0] / s - v[0] * gsx / s2, n1y = d[1] / s - v[0] * gsy / s2;
  double n2x = d[2] / s - v[1] * gsx / s2, n2y = d[3] / s - v[1] * gsy / s2;
  double b = s2 * (n1x * n1x + n1y * n1y + n2x * n2x + n2y * n2y);
  double cx = v[0] * d[2] - v[1] * d[0];
  double cy = v[0] * d[3] - v[1] * d[1];
  double c = (cx * cx + cy * cy) / s2;
  double p = (gp[0] * gp[0] + gp[1] * gp[1]) / s2;
  double vals[4] = {a, b, c, p};
  return *std::max_element(vals, vals + 4) - *std::min_element(vals, vals + 4);
}

/// phi_{1,R}: 1 on |x| <= R, linear down to 0 at |x| = 2R.
[[nodiscard]] inline double cutoff_linear(double x, double R) {
  double a = std::abs(x);
  if (a <= R) return 1.0;
  if (a >= 2.0 * R) return 0.0;
  return 2.0 - a / R;
}

/// phi_{log,R}: 1 on |x| <= R, 2 - log|x| / log R up to |x| = R^2, then 0.
[[nodiscard]] inline double cutoff_log(double r, double R) {
  require(R > 1.0, ErrorCode::InvalidArgument, "the logarithmic cutoff needs R > 1");
  if (r <= R) return 1.0;
  if (r >= R * R) return 0.0;
  return 2.0 - std::log(r) / std::log(R);
}

/// -integral over the walls of phi_R |v1| d_n v2, for each R. The plateau
/// {|x1| <= R} must fit inside the grid; the part of the cutoff ramp beyond
/// the truncation is dropped.
[[nodiscard]] inline std::vector<std::pair<double, double>> boundary_trace_Jinf(const Flow& flow,
                                                                              const std::vector<double>& R_list) {
  const Grid& g = flow.grid;
  bool strip = g.kind() == DomainKind::StripTruncation;
  bool half = g.kind() == DomainKind::HalfPlaneTruncation;
  require(strip || half, ErrorCode::InvalidGrid, "boundary trace needs a strip or half-plane truncation");
  double reach = std::min(-g.x_range().lo, g.x_range().hi);
  ScalarField dv2 = d_dy(flow.velocity.second());
  std::vector<std::pair<double, double>> out;
  for (double R : R_list) {
    require(R > 0.0 && R <= reach, ErrorCode::RTooLarge,
            "R = " + std::to_string(R) + " does not fit inside |x1| <= " + std::to_string(reach));
    double total = 0.0;
    for (int j : flow.wall_rows) {
      double normal = j == 0 ? -1.0 : 1.0;
      double line = 0.0;
      for (int i = 0; i < g.nx(); ++i) {
        double x = g.x(i);
        double phi = strip ? cutoff_linear(x, R) : cutoff_log(std::abs(x), R);
        double w = detail::trapezoid_weight(i, g.nx(), g.hx(), false);
        line += w * phi * std::abs(flow.velocity.u_values()[g.index(i, j)]) * normal * dv2(i, j);
      }
      total -= line;
    }
    out.emplace_back(R, total);
  }
  return out;
}

struct CurvatureProfile {
  int n_bins = 64;
  std::vector<double> bin_mass;
  double total = 0.0;

  [[nodiscard]] double bin_width() const { return 2.0 * std::numbers::pi / n_bins; }
  [[nodiscard]] double bin_center(int b) const { return -std::numbers::pi + (b + 0.5) * bin_width(); }
};

/// Area integrand binned by flow direction.
[[nodiscard]] inline CurvatureProfile kappa_distribution(const Flow& flow, int n_bins = 64, QuadratureRule rule = {}) {
  require(n_bins >= 16 && n_bins % 2 == 0, ErrorCode::InvalidArgument, "n_bins must be even and at least 16");
  VelocityGradients d = velocity_gradients(flow);
  CurvatureProfile out;
  out.n_bins = n_bins;
  out.bin_mass.assign(n_bins, 0.0);
  detail::for_each_curvature_sample(flow, d, stagnation_floor(flow, d), rule, [&](const detail::CurvatureSample& p) {
    out.bin_mass[angle_bin(flow_angle(p.v1, p.v2), n_bins)] += p.mass;
  });
  for (double m : out.bin_mass) out.total += m;
  return out;
}

/// Population standard deviation over mean.
[[nodiscard]] inline double coefficient_of_variation(const std::vector<double>& values) {
  if (values.empty()) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= values.size();
  if (mean == 0.0) return 0.0;
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  return std::sqrt(var / values.size()) / std::abs(mean);
}

/// Bins lying strictly inside (0, pi), i.e. n/2 .. n-2.
[[nodiscard]] inline std::vector<int> interior_upper_bins(int n) {
  std::vector<int> b;
  for (int k = n / 2; k <= n - 2; ++k) b.push_back(k);
  return b;
}

/// Bins lying strictly inside (-pi, 0), i.e. 0 .. n/2-2.
[[nodiscard]] inline std::vector<int> interior_lower_bins(int n) {
  std::vector<int> b;
  for (int k = 0; k <= n / 2 - 2; ++k) b.push_back(k);
  return b;
}

[[nodiscard]] inline std::vector<double> select(const std::vector<double>& v, const std::vector<int>& idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (int k : idx) out.push_back(v[k]);
  return out;
}

struct Classification {
  enum class Kind { Shear, FullCircle, TypeIIIUpper, TypeIIILower, Arc, Indeterminate } kind = Kind::Indeterminate;
  /// Arc only: occupied set is the closed arc of half-length pi - beta centred at theta0.
  double beta = 0.0;
  double theta0 = 0.0;

  [[nodiscard]] std::string name() const {
    switch (kind) {
      case Kind::Shear: return "Shear";
      case Kind::FullCircle: return "FullCircle";
      case Kind::TypeIIIUpper: return "TypeIIIUpper";
      case Kind::TypeIIILower: return "TypeIIILower";
      case Kind::Arc: return "Arc";
      case Kind::Indeterminate: return "Indeterminate";
    }
    return "Indeterminate";
  }
  friend bool operator==(const Classification& a, const Classification& b) {
    return a.kind == b.kind && a.beta == b.beta && a.theta0 == b.theta0;
  }
};

/// Bins at the semicircle endpoints (directions (1,0) and (-1,0)) that may be
/// empty before a semicircle verdict is rejected.
struct OccupancyRule {
  int endpoint_slack = 1;
};

[[nodiscard]] inline Classification classify(const AngleSet& angles, double total_curvature, double tol_curv = 1e-10,
                                             OccupancyRule rule = {}) {
  using Kind = Classification::Kind;
  if (total_curvature < tol_curv) return {Kind::Shear};
  int n = angles.n_bins;
  const auto& occ = angles.occupied;
  if (angles.count_occupied() == n) return {Kind::FullCircle};

  auto semicircle = [&](bool upper) {
    // Closed upper semicircle [0, pi]: bins n/2-1 .. n-1. Endpoint bins
    // n/2-1 (holds 0) and n-1 (holds pi) are optional up to the slack.
    int empty_endpoints = 0;
    for (int b = 0; b < n; ++b) {
      bool endpoint = b == n / 2 - 1 || b == n - 1;
      bool inside = upper ? (b >= n / 2 && b <= n - 2) : (b <= n / 2 - 2);
      if (endpoint) {
        if (!occ[b]) ++empty_endpoints;
      } else if (inside != occ[b]) {
        return false;
      }
    }
    return empty_endpoints <= 2 * rule.endpoint_slack;
  };
  if (semicircle(true)) return {Kind::TypeIIIUpper};
  if (semicircle(false)) return {Kind::TypeIIILower};

  // A single circular run of empty bins makes the occupied set an arc.
  int runs = 0;
  int start = -1;
  for (int b = 0; b < n; ++b) {
    bool begins = !occ[b] && occ[(b - 1 + n) % n];
    if (begins) {
      ++runs;
      start = b;
    }
  }
  if (runs == 1) {
    int len = 0;
    while (!occ[(start + len) % n]) ++len;
    double w = angles.bin_width();
    double gap_center = -std::numbers::pi + (start + 0.5 * len) * w;
    double theta0 = gap_center + std::numbers::pi;
    if (theta0 > std::numbers::pi) theta0 -= 2.0 * std::numbers::pi;
    return {Kind::Arc, 0.5 * len * w, theta0};
  }
  return {Kind::Indeterminate};
}

enum class MarginMode { VorticityGradient, W2inf };

struct StabilityMargin {
  double value = 0.0;
  /// VorticityGradient only: min s'' > 0, the hypothesis under which a
  /// positive margin certifies a shear flow.
  bool applicable = true;
  double min_s2 = 0.0;
  double deviation = 0.0;
};

/// VorticityGradient: min s'' - max |d/dy (omega - omega_sh)|, omega_sh = -s'.
/// W2inf: max over value, first and second differences of v1 - s.
[[nodiscard]] inline StabilityMargin stability_margin(const Flow& flow, const Profile& s, MarginMode mode) {
  const Grid& g = flow.grid;
  require(g.kind() == DomainKind::StripTruncation, ErrorCode::NotAStripGrid, "stability margin needs a strip grid");
  require(s.n() == g.ny() && s.interval == g.y_range(), ErrorCode::IncompatibleGrid,
          "shear profile must be sampled on the transverse nodes");
  int n = s.n();
  std::vector<double> s1(n), s2(n);
  for (int k = 0; k < n; ++k) {
    s1[k] = detail::diff1(s.values.data(), 1, n, k, s.h(), false);
    s2[k] = detail::diff2(s.values.data(), 1, n, k, s.h(), false);
  }
  StabilityMargin out;
  out.min_s2 = *std::min_element(s2.begin(), s2.end());
  if (mode == MarginMode::VorticityGradient) {
    ScalarField diff = flow.vorticity;
    for (int j = 0; j < g.ny(); ++j) {
      for (int i = 0; i < g.nx(); ++i) diff(i, j) += s1[j];
    }
    out.deviation = max_abs(d_dy(diff));
    out.value = out.min_s2 - out.deviation;
    out.applicable = out.min_s2 > 0.0;
    return out;
  }
  ScalarField diff = flow.velocity.first();
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) diff(i, j) -= s.values[j];
  }
  double m = max_abs(diff);
  m = std::max(m, max_abs(d_dx(diff)));
  m = std::max(m, max_abs(d_dy(diff)));
  m = std::max(m, max_abs(d2_dx2(diff)));
  m = std::max(m, max_abs(d2_dy2(diff)));
  m = std::max(m, max_abs(d_dy(d_dx(diff))));
  out.deviation = m;
  out.value = m;
  return out;
}

/// Far-field wall limits of v1: upper wall (x2 = top) and lower wall
/// (x2 = bottom) as x1 -> +inf (plus) and -inf (minus), estimated as means
/// over the outermost `fraction` of columns at each end.
struct WallLimits {
  std::optional<double> upper_plus, upper_minus;
  double lower_plus = 0.0;
  double lower_minus = 0.0;
};

[[nodiscard]] inline WallLimits wall_limits(const Flow& flow, double fraction = 0.1) {
  const Grid& g = flow.grid;
  require(!flow.wall_rows.empty(), ErrorCode::InvalidGrid, "wall limits need wall rows");
  int count = std::max(1, static_cast<int>(std::ceil(fraction * g.nx())));
  auto mean = [&](int j, bool plus) {
    double s = 0.0;
    for (int c = 0; c < count; ++c) {
      int i = plus ? g.nx() - 1 - c : c;
      s += flow.velocity.u_values()[g.index(i, j)];
    }
    return s / count;
  };
  WallLimits out;
  out.lower_plus = mean(0, true);
  out.lower_minus = mean(0, false);
  if (g.kind() == DomainKind::StripTruncation) {
    out.upper_plus = mean(g.ny() - 1, true);
    out.upper_minus = mean(g.ny() - 1, false);
  }
  return out;
}

/// Relative defect of upper+^2 - upper-^2 = lower+^2 - lower-^2, scaled by
/// the largest squared limit.
[[nodiscard]] inline double boundary_asymptotics_gap(const WallLimits& w) {
  require(w.upper_plus.has_value(), ErrorCode::NotAStripGrid, "boundary asymptotics need both walls");
  double up = *w.upper_plus, um = *w.upper_minus;
  double lhs = up * up - um * um;
  double rhs = w.lower_plus * w.lower_plus - w.lower_minus * w.lower_minus;
  double scale = std::max({up * up, um * um, w.lower_plus * w.lower_plus, w.lower_minus * w.lower_minus, 1e-300});
  return std::abs(lhs - rhs) / scale;
}

struct AnalyzeOptions {
  int n_bins = 360;
  int kappa_bins = 64;
  std::vector<double> R_list;
  double tol_curv = 1e-10;
  /// Identity residuals are reported over nodes with |v| at least this
  /// fraction of max |v|.
  double identity_speed_fraction = 0.1;
  QuadratureRule quadrature;
};

struct DiagnosticsReport {
  double total_curvature = 0.0;
  double J_inf_signed = 0.0;
  std::vector<std::pair<double, double>> J_inf_trace;
  double lower_bound_gap = 0.0;
  Classification verdict;
  double kappa_cv_upper = 0.0;
  double kappa_cv_lower = 0.0;
  double kappa_cv_all = 0.0;
  double identity_residual_max = 0.0;
  double stagnation_floor = 0.0;
  AngleSet angles;
  CurvatureProfile kappa;
  std::optional<WallLimits> walls;
};

[[nodiscard]] inline std::vector<double> default_R_list(const Grid& g) {
  double reach = std::min(-g.x_range().lo, g.x_range().hi);
  if (g.kind() == DomainKind::StripTruncation) return {reach / 3.0, reach / 2.0, 2.0 * reach / 3.0};
  if (g.kind() == DomainKind::HalfPlaneTruncation) return {reach / 4.0, reach / 2.0, 0.6 * reach};
  return {};
}

/// Speed-filtered interior maximum of the identity residual.
[[nodiscard]] inline double identity_residual_max(const Flow& flow, const ScalarField& residual_field,
                                                  double speed_fraction) {
  const Grid& g = flow.grid;
  double vmax = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) vmax = std::max(vmax, flow.velocity.norm(k));
  return max_abs_where(residual_field, [&](int i, int j) {
    return !g.is_boundary(i, j) && flow.velocity.norm(g.index(i, j)) >= speed_fraction * vmax;
  });
}

[[nodiscard]] inline DiagnosticsReport analyze(const Flow& flow, const AnalyzeOptions& options = {}) {
  DiagnosticsReport r;
  VelocityGradients d = velocity_gradients(flow);
  r.stagnation_floor = stagnation_floor(flow, d);
  r.total_curvature = total_curvature(flow, {}, options.quadrature);
  r.J_inf_signed = signed_curvature_integral(flow, options.quadrature);
  r.lower_bound_gap = 2.0 / std::numbers::pi * r.total_curvature - std::abs(r.J_inf_signed);
  r.angles = angle_set(flow, r.stagnation_floor, options.n_bins);
  r.verdict = classify(r.angles, r.total_curvature, options.tol_curv);
  r.kappa = kappa_distribution(flow, options.kappa_bins, options.quadrature);
  r.kappa_cv_upper = coefficient_of_variation(select(r.kappa.bin_mass, interior_upper_bins(r.kappa.n_bins)));
  r.kappa_cv_lower = coefficient_of_variation(select(r.kappa.bin_mass, interior_lower_bins(r.kappa.n_bins)));
  r.kappa_cv_all = coefficient_of_variation(r.kappa.bin_mass);
  r.identity_residual_max =
      identity_residual_max(flow, curvature_identity_residual(flow), options.identity_speed_fraction);
  const Grid& g = flow.grid;
  if (g.kind() == DomainKind::StripTruncation || g.kind() == DomainKind::HalfPlaneTruncation) {
    std::vector<double> R = options.R_list.empty() ? default_R_list(g) : options.R_list;
    r.J_inf_trace = boundary_trace_Jinf(flow, R);
    r.walls = wall_limits(flow);
  }
  return r;
}

}  // namespace eulerlab
