#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "flows.hpp"
#include "grid.hpp"

namespace eulerlab {

enum class Termination { MaxSteps, LeftDomain, Stagnated, Closed };

constexpr std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::MaxSteps: return "MaxSteps";
    case Termination::LeftDomain: return "LeftDomain";
    case Termination::Stagnated: return "Stagnated";
    case Termination::Closed: return "Closed";
  }
  return "?";
}

struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
  Vec2 seed{0.0, 0.0};
  Termination termination = Termination::MaxSteps;
};

namespace detail {

/// Cell index and local coordinate in [0, 1] along one axis; nullopt
/// outside a non-periodic range.
inline std::optional<std::pair<int, double>> locate(double p, Interval range, int n, double h, bool periodic) {
  if (periodic) {
    double period = range.length();
    double q = std::fmod(p - range.lo, period);
    if (q < 0.0) q += period;
    int c = std::min(static_cast<int>(q / h), n - 1);
    return std::pair{c, q / h - c};
  }
  if (p < range.lo || p > range.hi) return std::nullopt;
  int c = std::min(static_cast<int>((p - range.lo) / h), n - 2);
  return std::pair{c, std::clamp((p - range.lo) / h - c, 0.0, 1.0)};
}

}  // namespace detail

/// Bilinear interpolation of nodal values; nullopt outside the grid.
[[nodiscard]] inline std::optional<Vec2> interpolate(const VectorField& w, double x, double y) {
  const Grid& g = w.grid();
  auto cx = detail::locate(x, g.x_range(), g.nx(), g.hx(), g.periodic_x());
  auto cy = detail::locate(y, g.y_range(), g.ny(), g.hy(), g.periodic_y());
  if (!cx || !cy) return std::nullopt;
  auto [i, s] = *cx;
  auto [j, t] = *cy;
  int i1 = (i + 1) % g.nx();
  int j1 = (j + 1) % g.ny();
  std::size_t k00 = g.index(i, j), k10 = g.index(i1, j), k01 = g.index(i, j1), k11 = g.index(i1, j1);
  auto mix = [&](const std::vector<double>& f) {
    return (1 - s) * (1 - t) * f[k00] + s * (1 - t) * f[k10] + (1 - s) * t * f[k01] + s * t * f[k11];
  };
  return Vec2{mix(w.u_values()), mix(w.v_values())};
}

[[nodiscard]] inline std::optional<double> interpolate(const ScalarField& f, double x, double y) {
  VectorField w(f.grid(), f.values(), f.values());
  auto v = interpolate(w, x, y);
  if (!v) return std::nullopt;
  return (*v)[0];
}

struct TraceOptions {
  /// Arc-length step; 0 means min(hx, hy) / 2.
  double step = 0.0;
  int max_steps = 200000;
  /// Stagnation threshold; negative means the flow's stagnation floor.
  double floor = -1.0;
  /// -1 integrates against the flow.
  int direction = 1;
};

/// RK4 along the unit direction field v/|v| of the bilinear velocity, so the
/// step is arc length.
[[nodiscard]] inline Polyline trace(const Flow& flow, Vec2 seed, const TraceOptions& options = {}) {
  const Grid& g = flow.grid;
  if (!g.contains(seed[0], seed[1])) {
    fail(ErrorCode::SeedOutsideDomain,
         "seed (" + std::to_string(seed[0]) + ", " + std::to_string(seed[1]) + ") is outside the grid");
  }
  double step = options.step > 0.0 ? options.step : 0.5 * g.h_min();
  double floor = options.floor >= 0.0 ? options.floor : stagnation_floor(flow);
  double sign = options.direction < 0 ? -1.0 : 1.0;
  Polyline out;
  out.seed = seed;
  out.points.push_back(seed);
  auto direction = [&](Vec2 p) -> std::optional<Vec2> {
    auto v = interpolate(flow.velocity, p[0], p[1]);
    if (!v) return std::nullopt;
    double s = std::hypot((*v)[0], (*v)[1]);
    if (s <= floor) return Vec2{0.0, 0.0};
    return Vec2{sign * (*v)[0] / s, sign * (*v)[1] / s};
  };
  Vec2 p = seed;
  for (int n = 0; n < options.max_steps; ++n) {
    std::array<Vec2, 4> k{};
    bool outside = false;
    bool stagnant = false;
    Vec2 q = p;
    for (int stage = 0; stage < 4; ++stage) {
      if (stage > 0) {
        double c = stage == 3 ? step : 0.5 * step;
        q = {p[0] + c * k[stage - 1][0], p[1] + c * k[stage - 1][1]};
      }
      auto d = direction(q);
      if (!d) {
        outside = true;
        break;
      }
      if ((*d)[0] == 0.0 && (*d)[1] == 0.0) {
        stagnant = true;
        break;
      }
      k[stage] = *d;
    }
    if (outside) {
      out.termination = Termination::LeftDomain;
      return out;
    }
    if (stagnant) {
      out.termination = Termination::Stagnated;
      return out;
    }
    Vec2 next{p[0] + step / 6.0 * (k[0][0] + 2 * k[1][0] + 2 * k[2][0] + k[3][0]),
              p[1] + step / 6.0 * (k[0][1] + 2 * k[1][1] + 2 * k[2][1] + k[3][1])};
    if (!g.contains(next[0], next[1])) {
      out.termination = Termination::LeftDomain;
      return out;
    }
    out.points.push_back(next);
    p = next;
    if (out.points.size() > 10 && std::hypot(p[0] - seed[0], p[1] - seed[1]) < step) {
      out.closed = true;
      out.termination = Termination::Closed;
      return out;
    }
  }
  out.termination = Termination::MaxSteps;
  return out;
}

/// Backward and forward traces joined at the seed; a closed forward trace
/// is returned as is.
[[nodiscard]] inline Polyline trace_through(const Flow& flow, Vec2 seed, TraceOptions options = {}) {
  options.direction = 1;
  Polyline forward = trace(flow, seed, options);
  if (forward.closed) return forward;
  options.direction = -1;
  Polyline backward = trace(flow, seed, options);
  Polyline out;
  out.seed = seed;
  out.termination = forward.termination;
  out.points.assign(backward.points.rbegin(), backward.points.rend());
  out.points.insert(out.points.end(), forward.points.begin() + 1, forward.points.end());
  return out;
}

/// Marching squares on the nodal values. A corner is inside when its value
/// is >= level; ambiguous cells are resolved by the mean of the corners.
[[nodiscard]] inline std::vector<Polyline> level_contours(const ScalarField& u, const std::vector<double>& levels) {
  const Grid& g = u.grid();
  for (double level : levels) require(std::isfinite(level), ErrorCode::InvalidArgument, "contour levels must be finite");
  int cells_x = g.periodic_x() ? g.nx() : g.nx() - 1;
  int cells_y = g.periodic_y() ? g.ny() : g.ny() - 1;
  std::vector<Polyline> out;
  for (double level : levels) {
    // Edge key: 2 * index(i, j) for the edge to (i + 1, j), + 1 for (i, j + 1).
    std::unordered_map<std::uint64_t, Vec2> point;
    std::unordered_map<std::uint64_t, std::vector<std::uint64_t>> links;
    auto crossing = [&](int i, int j, bool vertical) {
      std::uint64_t key = 2 * static_cast<std::uint64_t>(g.index(i, j)) + (vertical ? 1 : 0);
      if (!point.count(key)) {
        int i1 = vertical ? i : (i + 1) % g.nx();
        int j1 = vertical ? (j + 1) % g.ny() : j;
        double a = u(i, j), b = u(i1, j1);
        double t = (level - a) / (b - a);
        double x = g.x(i) + (vertical ? 0.0 : t * g.hx());
        double y = g.y(j) + (vertical ? t * g.hy() : 0.0);
        point[key] = {x, y};
      }
      return key;
    };
    auto link = [&](std::uint64_t a, std::uint64_t b) {
      links[a].push_back(b);
      links[b].push_back(a);
    };
    for (int j = 0; j < cells_y; ++j) {
      int j1 = (j + 1) % g.ny();
      for (int i = 0; i < cells_x; ++i) {
        int i1 = (i + 1) % g.nx();
        double c00 = u(i, j), c10 = u(i1, j), c11 = u(i1, j1), c01 = u(i, j1);
        int mask = (c00 >= level ? 1 : 0) | (c10 >= level ? 2 : 0) | (c11 >= level ? 4 : 0) | (c01 >= level ? 8 : 0);
        if (mask == 0 || mask == 15) continue;
        auto bottom = [&] { return crossing(i, j, false); };
        auto right = [&] { return crossing(i1, j, true); };
        auto top = [&] { return crossing(i, j1, false); };
        auto left = [&] { return crossing(i, j, true); };
        bool center_in = 0.25 * (c00 + c10 + c11 + c01) >= level;
        switch (mask) {
          case 1: case 14: link(left(), bottom()); break;
          case 2: case 13: link(bottom(), right()); break;
          case 3: case 12: link(left(), right()); break;
          case 4: case 11: link(right(), top()); break;
          case 6: case 9: link(bottom(), top()); break;
          case 7: case 8: link(left(), top()); break;
          case 5:
            if (center_in) {
              link(left(), top());
              link(bottom(), right());
            } else {
              link(left(), bottom());
              link(right(), top());
            }
            break;
          case 10:
            if (center_in) {
              link(left(), bottom());
              link(right(), top());
            } else {
              link(left(), top());
              link(bottom(), right());
            }
            break;
          default: break;
        }
      }
    }
    // Stitch: open chains start at endpoints of degree one, then loops.
    std::vector<std::uint64_t> keys;
    keys.reserve(links.size());
    for (const auto& [key, _] : links) keys.push_back(key);
    std::sort(keys.begin(), keys.end());
    std::unordered_map<std::uint64_t, bool> used_edge;
    auto edge_id = [](std::uint64_t a, std::uint64_t b) { return a < b ? (a << 32) ^ b : (b << 32) ^ a; };
    auto walk = [&](std::uint64_t start) {
      Polyline line;
      std::uint64_t current = start;
      line.points.push_back(point[current]);
      while (true) {
        std::optional<std::uint64_t> next;
        for (std::uint64_t n : links[current]) {
          if (!used_edge[edge_id(current, n)]) {
            next = n;
            break;
          }
        }
        if (!next) break;
        used_edge[edge_id(current, *next)] = true;
        current = *next;
        line.points.push_back(point[current]);
        if (current == start) {
          line.closed = true;
          break;
        }
      }
      line.seed = line.points.front();
      line.termination = line.closed ? Termination::Closed : Termination::LeftDomain;
      return line;
    };
    auto has_free_edge = [&](std::uint64_t key) {
      for (std::uint64_t n : links[key]) {
        if (!used_edge[edge_id(key, n)]) return true;
      }
      return false;
    };
    for (std::uint64_t key : keys) {
      if (links[key].size() == 1 && has_free_edge(key)) out.push_back(walk(key));
    }
    for (std::uint64_t key : keys) {
      while (has_free_edge(key)) out.push_back(walk(key));
    }
  }
  return out;
}

struct StagnationPoint {
  double x = 0.0;
  double y = 0.0;
  double speed = 0.0;
};

/// A connected set of near-stagnant nodes that is not an isolated point,
/// such as the zero line of a shear flow.
struct DegenerateStagnationSet {
  std::vector<std::pair<int, int>> nodes;
  Interval x_extent{};
  Interval y_extent{};
};

struct StagnationReport {
  std::vector<StagnationPoint> points;
  std::vector<DegenerateStagnationSet> degenerate;
  double floor = 0.0;
};

namespace detail {

struct QuadraticFit {
  bool positive_definite = false;
  double dx = 0.0;
  double dy = 0.0;
  double minimum = 0.0;
};

/// Least squares q = a + b x + c y + d x^2 + e x y + f y^2 through the 3x3
/// stencil of |v|^2 in units of the spacing, and its stationary point.
inline QuadraticFit fit_speed_squared(const Flow& flow, int i, int j) {
  const Grid& g = flow.grid;
  auto s2 = [&](int di, int dj) {
    int a = (i + di + g.nx()) % g.nx();
    int b = (j + dj + g.ny()) % g.ny();
    double n = flow.velocity.norm(g.index(a, b));
    return n * n;
  };
  double a = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (int dj = -1; dj <= 1; ++dj) {
    for (int di = -1; di <= 1; ++di) {
      double q = s2(di, dj);
      a += q;
      sx += di * q;
      sy += dj * q;
      sxx += di * di * q;
      syy += dj * dj * q;
      sxy += di * dj * q;
    }
  }
  // Normal equations on the 3x3 stencil decouple into these moments.
  double b = sx / 6.0, c = sy / 6.0, e = sxy / 4.0;
  double d = sxx / 2.0 - a / 3.0;
  double f = syy / 2.0 - a / 3.0;
  double c0 = (a - 6.0 * (d + f)) / 9.0;
  QuadraticFit fit;
  double det = 4.0 * d * f - e * e;
  fit.positive_definite = d > 0.0 && det > 0.0;
  if (!fit.positive_definite) return fit;
  fit.dx = (-2.0 * f * b + e * c) / det;
  fit.dy = (-2.0 * d * c + e * b) / det;
  fit.minimum = c0 + b * fit.dx + c * fit.dy + d * fit.dx * fit.dx + e * fit.dx * fit.dy + f * fit.dy * fit.dy;
  return fit;
}

inline bool truncation_node(const Grid& g, int i, int j) {
  if (g.kind() != DomainKind::StripTruncation && g.kind() != DomainKind::HalfPlaneTruncation &&
      g.kind() != DomainKind::Quadrant) {
    return false;
  }
  bool end_column = !g.periodic_x() && (i == 0 || i == g.nx() - 1);
  bool far_row = g.kind() != DomainKind::StripTruncation && j == g.ny() - 1;
  bool quadrant_axis = g.kind() == DomainKind::Quadrant && i == 0;
  return (end_column && !quadrant_axis) || far_row;
}

}  // namespace detail

/// Sets where |v| <= floor, split into isolated points (refined by a 3x3
/// quadratic fit of |v|^2 when it is positive definite) and degenerate sets.
/// Interior local minima of |v| count as stagnant when the fitted minimum is
/// below max(floor, h |grad v| / 10). Components touching a truncation edge are dropped
/// unless they reach the opposite edge.
[[nodiscard]] inline StagnationReport stagnation_points(const Flow& flow, double floor = -1.0) {
  const Grid& g = flow.grid;
  StagnationReport report;
  report.floor = floor >= 0.0 ? floor : stagnation_floor(flow);
  int nx = g.nx(), ny = g.ny();
  std::vector<char> mask(g.size(), 0);
  VelocityGradients d = velocity_gradients(flow);
  std::vector<double> grad_norm(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    grad_norm[k] = std::hypot(std::hypot(d.grad_v1.u_values()[k], d.grad_v1.v_values()[k]),
                              std::hypot(d.grad_v2.u_values()[k], d.grad_v2.v_values()[k]));
  }
  auto speed = [&](int i, int j) { return flow.velocity.norm(g.index(i, j)); };
  auto has_stencil = [&](int i, int j) {
    return (g.periodic_x() || (i > 0 && i < nx - 1)) && (g.periodic_y() || (j > 0 && j < ny - 1));
  };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      if (speed(i, j) <= report.floor) {
        mask[g.index(i, j)] = 1;
        continue;
      }
      if (!has_stencil(i, j)) continue;
      bool minimum = true;
      for (int dj = -1; dj <= 1 && minimum; ++dj) {
        for (int di = -1; di <= 1; ++di) {
          if ((di || dj) && speed((i + di + nx) % nx, (j + dj + ny) % ny) < speed(i, j)) {
            minimum = false;
            break;
          }
        }
      }
      if (!minimum) continue;
      detail::QuadraticFit fit = detail::fit_speed_squared(flow, i, j);
      double threshold = std::max(report.floor, 0.1 * g.h_min() * grad_norm[g.index(i, j)]);
      if (fit.positive_definite && std::sqrt(std::max(fit.minimum, 0.0)) <= threshold) mask[g.index(i, j)] = 1;
    }
  }
  std::vector<char> seen(g.size(), 0);
  for (int j0 = 0; j0 < ny; ++j0) {
    for (int i0 = 0; i0 < nx; ++i0) {
      if (!mask[g.index(i0, j0)] || seen[g.index(i0, j0)]) continue;
      std::vector<std::pair<int, int>> comp;
      std::vector<std::pair<int, int>> stack{{i0, j0}};
      seen[g.index(i0, j0)] = 1;
      while (!stack.empty()) {
        auto [i, j] = stack.back();
        stack.pop_back();
        comp.emplace_back(i, j);
        for (int dj = -1; dj <= 1; ++dj) {
          for (int di = -1; di <= 1; ++di) {
            int a = i + di, b = j + dj;
            if (g.periodic_x()) a = (a + nx) % nx;
            if (g.periodic_y()) b = (b + ny) % ny;
            if (a < 0 || a >= nx || b < 0 || b >= ny) continue;
            std::size_t k = g.index(a, b);
            if (mask[k] && !seen[k]) {
              seen[k] = 1;
              stack.emplace_back(a, b);
            }
          }
        }
      }
      std::sort(comp.begin(), comp.end(), [](auto p, auto q) { return p.second != q.second ? p.second < q.second : p.first < q.first; });
      int imin = nx, imax = -1, jmin = ny, jmax = -1;
      bool touches = false;
      for (auto [i, j] : comp) {
        imin = std::min(imin, i);
        imax = std::max(imax, i);
        jmin = std::min(jmin, j);
        jmax = std::max(jmax, j);
        touches = touches || detail::truncation_node(g, i, j);
      }
      bool spans = (!g.periodic_x() && imin == 0 && imax == nx - 1) || (g.periodic_x() && imax - imin + 1 >= nx) ||
                   (g.periodic_y() && jmax - jmin + 1 >= ny);
      bool compact = imax - imin <= 1 && jmax - jmin <= 1;
      if (touches && !spans) continue;
      if (compact && !spans) {
        auto best = *std::min_element(comp.begin(), comp.end(),
                                      [&](auto p, auto q) { return speed(p.first, p.second) < speed(q.first, q.second); });
        auto [i, j] = best;
        StagnationPoint p{g.x(i), g.y(j), speed(i, j)};
        if (has_stencil(i, j)) {
          detail::QuadraticFit fit = detail::fit_speed_squared(flow, i, j);
          if (fit.positive_definite && std::abs(fit.dx) <= 1.0 && std::abs(fit.dy) <= 1.0) {
            p.x += fit.dx * g.hx();
            p.y += fit.dy * g.hy();
            p.speed = std::min(p.speed, std::sqrt(std::max(fit.minimum, 0.0)));
          }
        }
        report.points.push_back(p);
        continue;
      }
      DegenerateStagnationSet set;
      set.nodes = std::move(comp);
      set.x_extent = {g.x(imin), g.x(imax)};
      set.y_extent = {g.y(jmin), g.y(jmax)};
      report.degenerate.push_back(std::move(set));
    }
  }
  return report;
}

}  // namespace eulerlab
