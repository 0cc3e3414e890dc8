#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace eulerlab {

enum class DomainKind { StripTruncation, HalfPlaneTruncation, Quadrant, Torus, Plane };

constexpr std::string_view to_string(DomainKind kind) {
  switch (kind) {
    case DomainKind::StripTruncation: return "StripTruncation";
    case DomainKind::HalfPlaneTruncation: return "HalfPlaneTruncation";
    case DomainKind::Quadrant: return "Quadrant";
    case DomainKind::Torus: return "Torus";
    case DomainKind::Plane: return "Plane";
  }
  return "Unknown";
}

inline DomainKind domain_kind_from_string(std::string_view name) {
  for (auto kind : {DomainKind::StripTruncation, DomainKind::HalfPlaneTruncation, DomainKind::Quadrant,
                    DomainKind::Torus, DomainKind::Plane}) {
    if (to_string(kind) == name) return kind;
  }
  fail(ErrorCode::InvalidGrid, "unknown domain kind '" + std::string(name) + "'");
}

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  [[nodiscard]] double length() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Node-centred tensor grid. Node (i, j) sits at (x(i), y(j)); storage is
/// row-major with i (the x index) running fastest.
class Grid {
 public:
  Grid() = default;

  Grid(int nx, int ny, Interval x_range, Interval y_range, DomainKind kind = DomainKind::Plane,
       bool periodic_x = false, bool periodic_y = false)
      : nx_(nx), ny_(ny), x_(x_range), y_(y_range), kind_(kind), periodic_x_(periodic_x), periodic_y_(periodic_y) {
    require(nx >= 8 && ny >= 8, ErrorCode::InvalidGrid, "grid needs at least 8 nodes per axis");
    require(x_range.length() > 0.0 && y_range.length() > 0.0, ErrorCode::InvalidGrid,
            "grid intervals must have positive length");
    if (kind == DomainKind::StripTruncation) {
      require(y_range.lo == -1.0 && y_range.hi == 1.0, ErrorCode::InvalidGrid,
              "strip truncation requires y in [-1, 1]");
    }
    hx_ = x_.length() / (periodic_x ? nx : nx - 1);
    hy_ = y_.length() / (periodic_y ? ny : ny - 1);
  }

  /// (-L, L) x (-1, 1)
  static Grid strip(double L, int nx, int ny) {
    return Grid(nx, ny, {-L, L}, {-1.0, 1.0}, DomainKind::StripTruncation);
  }
  /// (-L, L) x (0, L)
  static Grid half_plane(double L, int nx, int ny) {
    return Grid(nx, ny, {-L, L}, {0.0, L}, DomainKind::HalfPlaneTruncation);
  }
  /// (0, L) x (0, L)
  static Grid quadrant(double L, int n) { return Grid(n, n, {0.0, L}, {0.0, L}, DomainKind::Quadrant); }
  /// [0, period)^2 with periodic wrap on both axes.
  static Grid torus(int n, double period = 2.0 * std::numbers::pi) {
    return Grid(n, n, {0.0, period}, {0.0, period}, DomainKind::Torus, true, true);
  }

  [[nodiscard]] int nx() const { return nx_; }
  [[nodiscard]] int ny() const { return ny_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_); }
  [[nodiscard]] Interval x_range() const { return x_; }
  [[nodiscard]] Interval y_range() const { return y_; }
  [[nodiscard]] double hx() const { return hx_; }
  [[nodiscard]] double hy() const { return hy_; }
  [[nodiscard]] double h_min() const { return std::min(hx_, hy_); }
  [[nodiscard]] DomainKind kind() const { return kind_; }
  [[nodiscard]] bool periodic_x() const { return periodic_x_; }
  [[nodiscard]] bool periodic_y() const { return periodic_y_; }

  [[nodiscard]] double x(int i) const { return i == nx_ - 1 && !periodic_x_ ? x_.hi : x_.lo + i * hx_; }
  [[nodiscard]] double y(int j) const { return j == ny_ - 1 && !periodic_y_ ? y_.hi : y_.lo + j * hy_; }

  [[nodiscard]] std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i);
  }

  /// Boundary in the finite-difference sense: first/last node on a non-periodic axis.
  [[nodiscard]] bool is_boundary(int i, int j) const {
    return (!periodic_x_ && (i == 0 || i == nx_ - 1)) || (!periodic_y_ && (j == 0 || j == ny_ - 1));
  }

  /// Wall rows (j indices) carrying the slip condition v2 = 0.
  [[nodiscard]] std::vector<int> wall_rows() const {
    switch (kind_) {
      case DomainKind::StripTruncation: return {0, ny_ - 1};
      case DomainKind::HalfPlaneTruncation: return {0};
      default: return {};
    }
  }

  [[nodiscard]] bool contains(double px, double py) const {
    bool in_x = periodic_x_ || (px >= x_.lo && px <= x_.hi);
    bool in_y = periodic_y_ || (py >= y_.lo && py <= y_.hi);
    return in_x && in_y;
  }

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.x_ == b.x_ && a.y_ == b.y_ && a.kind_ == b.kind_ &&
           a.periodic_x_ == b.periodic_x_ && a.periodic_y_ == b.periodic_y_;
  }

 private:
  int nx_ = 8;
  int ny_ = 8;
  Interval x_{};
  Interval y_{};
  double hx_ = 1.0;
  double hy_ = 1.0;
  DomainKind kind_ = DomainKind::Plane;
  bool periodic_x_ = false;
  bool periodic_y_ = false;
};

inline void require_same_grid(const Grid& a, const Grid& b, std::string_view what) {
  require(a == b, ErrorCode::IncompatibleGrid, std::string(what) + ": fields live on different grids");
}

inline void require_finite(const std::vector<double>& values, std::string_view what) {
  for (double v : values) {
    if (!std::isfinite(v)) fail(ErrorCode::InvalidArgument, std::string(what) + " contains non-finite values");
  }
}

class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(Grid grid, double fill = 0.0) : grid_(std::move(grid)), values_(grid_.size(), fill) {}
  ScalarField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    require(values_.size() == grid_.size(), ErrorCode::InvalidArgument, "scalar field size does not match grid");
    require_finite(values_, "scalar field");
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& values() const { return values_; }
  [[nodiscard]] std::vector<double>& values() { return values_; }
  [[nodiscard]] double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  [[nodiscard]] double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  [[nodiscard]] double operator[](std::size_t k) const { return values_[k]; }
  [[nodiscard]] double& operator[](std::size_t k) { return values_[k]; }

 private:
  Grid grid_{};
  std::vector<double> values_;
};

class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(Grid grid) : grid_(std::move(grid)), u_(grid_.size(), 0.0), v_(grid_.size(), 0.0) {}
  VectorField(Grid grid, std::vector<double> u_values, std::vector<double> v_values)
      : grid_(std::move(grid)), u_(std::move(u_values)), v_(std::move(v_values)) {
    require(u_.size() == grid_.size() && v_.size() == grid_.size(), ErrorCode::InvalidArgument,
            "vector field size does not match grid");
    require_finite(u_, "vector field");
    require_finite(v_, "vector field");
  }
  VectorField(const ScalarField& first, const ScalarField& second)
      : VectorField(first.grid(), first.values(), second.values()) {
    require_same_grid(first.grid(), second.grid(), "vector field");
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] const std::vector<double>& u_values() const { return u_; }
  [[nodiscard]] const std::vector<double>& v_values() const { return v_; }
  [[nodiscard]] std::vector<double>& u_values() { return u_; }
  [[nodiscard]] std::vector<double>& v_values() { return v_; }
  [[nodiscard]] ScalarField first() const { return {grid_, u_}; }
  [[nodiscard]] ScalarField second() const { return {grid_, v_}; }
  [[nodiscard]] double norm(std::size_t k) const { return std::hypot(u_[k], v_[k]); }

 private:
  Grid grid_{};
  std::vector<double> u_;
  std::vector<double> v_;
};

template <class Fn>
ScalarField sample(const Grid& grid, Fn&& fn) {
  std::vector<double> values(grid.size());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) values[grid.index(i, j)] = fn(grid.x(i), grid.y(j));
  }
  return {grid, std::move(values)};
}

/// fn returns something destructurable into two doubles.
template <class Fn>
VectorField sample_vector(const Grid& grid, Fn&& fn) {
  std::vector<double> u(grid.size());
  std::vector<double> v(grid.size());
  for (int j = 0; j < grid.ny(); ++j) {
    for (int i = 0; i < grid.nx(); ++i) {
      auto [a, b] = fn(grid.x(i), grid.y(j));
      u[grid.index(i, j)] = a;
      v[grid.index(i, j)] = b;
    }
  }
  return {grid, std::move(u), std::move(v)};
}

namespace detail {

// First derivative of a strided line of n samples with spacing h.
inline double diff1(const double* f, std::ptrdiff_t stride, int n, int k, double h, bool periodic) {
  auto at = [&](int m) { return f[m * stride]; };
  if (periodic) {
    int km = (k - 1 + n) % n;
    int kp = (k + 1) % n;
    return (at(kp) - at(km)) / (2.0 * h);
  }
  if (k == 0) return (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
  if (k == n - 1) return (3.0 * at(n - 1) - 4.0 * at(n - 2) + at(n - 3)) / (2.0 * h);
  return (at(k + 1) - at(k - 1)) / (2.0 * h);
}

inline double diff2(const double* f, std::ptrdiff_t stride, int n, int k, double h, bool periodic) {
  auto at = [&](int m) { return f[m * stride]; };
  double h2 = h * h;
  if (periodic) {
    int km = (k - 1 + n) % n;
    int kp = (k + 1) % n;
    return (at(kp) - 2.0 * at(k) + at(km)) / h2;
  }
  if (k == 0) return (2.0 * at(0) - 5.0 * at(1) + 4.0 * at(2) - at(3)) / h2;
  if (k == n - 1) return (2.0 * at(n - 1) - 5.0 * at(n - 2) + 4.0 * at(n - 3) - at(n - 4)) / h2;
  return (at(k + 1) - 2.0 * at(k) + at(k - 1)) / h2;
}

}  // namespace detail

[[nodiscard]] inline ScalarField d_dx(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    const double* row = f.values().data() + g.index(0, j);
    for (int i = 0; i < g.nx(); ++i) out(i, j) = detail::diff1(row, 1, g.nx(), i, g.hx(), g.periodic_x());
  }
  return out;
}

[[nodiscard]] inline ScalarField d_dy(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int i = 0; i < g.nx(); ++i) {
    const double* col = f.values().data() + i;
    for (int j = 0; j < g.ny(); ++j) out(i, j) = detail::diff1(col, g.nx(), g.ny(), j, g.hy(), g.periodic_y());
  }
  return out;
}

[[nodiscard]] inline ScalarField d2_dx2(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    const double* row = f.values().data() + g.index(0, j);
    for (int i = 0; i < g.nx(); ++i) out(i, j) = detail::diff2(row, 1, g.nx(), i, g.hx(), g.periodic_x());
  }
  return out;
}

[[nodiscard]] inline ScalarField d2_dy2(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  for (int i = 0; i < g.nx(); ++i) {
    const double* col = f.values().data() + i;
    for (int j = 0; j < g.ny(); ++j) out(i, j) = detail::diff2(col, g.nx(), g.ny(), j, g.hy(), g.periodic_y());
  }
  return out;
}

[[nodiscard]] inline VectorField gradient(const ScalarField& f) { return {d_dx(f), d_dy(f)}; }

/// (-d/dy, d/dx)
[[nodiscard]] inline VectorField perp_gradient(const ScalarField& u) {
  ScalarField dy = d_dy(u);
  for (double& value : dy.values()) value = -value;
  return {dy, d_dx(u)};
}

[[nodiscard]] inline ScalarField divergence(const VectorField& w) {
  ScalarField out = d_dx(w.first());
  ScalarField dy = d_dy(w.second());
  for (std::size_t k = 0; k < out.values().size(); ++k) out[k] += dy[k];
  return out;
}

/// dv/dx - du/dy for w = (u, v)
[[nodiscard]] inline ScalarField curl(const VectorField& w) {
  ScalarField out = d_dx(w.second());
  ScalarField dy = d_dy(w.first());
  for (std::size_t k = 0; k < out.values().size(); ++k) out[k] -= dy[k];
  return out;
}

/// Five-point Laplacian in the interior. Values on non-periodic boundary
/// nodes use one-sided second-order stencils and should be excluded from
/// residual norms (see Grid::is_boundary).
[[nodiscard]] inline ScalarField laplacian(const ScalarField& f) {
  ScalarField out = d2_dx2(f);
  ScalarField yy = d2_dy2(f);
  for (std::size_t k = 0; k < out.values().size(); ++k) out[k] += yy[k];
  return out;
}

namespace detail {

inline double trapezoid_weight(int k, int n, double h, bool periodic) {
  if (periodic) return h;
  return (k == 0 || k == n - 1) ? 0.5 * h : h;
}

}  // namespace detail

[[nodiscard]] inline double quadrature_weight(const Grid& g, int i, int j) {
  return detail::trapezoid_weight(i, g.nx(), g.hx(), g.periodic_x()) *
         detail::trapezoid_weight(j, g.ny(), g.hy(), g.periodic_y());
}

/// Trapezoid rule on bounded axes, rectangle rule on periodic axes.
/// `keep(i, j)` selects the nodes that contribute.
template <class Pred>
[[nodiscard]] double integrate(const ScalarField& f, Pred&& keep) {
  const Grid& g = f.grid();
  double total = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    double row = 0.0;
    for (int i = 0; i < g.nx(); ++i) {
      if (keep(i, j)) row += detail::trapezoid_weight(i, g.nx(), g.hx(), g.periodic_x()) * f(i, j);
    }
    total += detail::trapezoid_weight(j, g.ny(), g.hy(), g.periodic_y()) * row;
  }
  return total;
}

[[nodiscard]] inline double integrate(const ScalarField& f) {
  return integrate(f, [](int, int) { return true; });
}

/// Maximum of |f| over interior nodes.
[[nodiscard]] inline double interior_max_abs(const ScalarField& f) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (!g.is_boundary(i, j)) m = std::max(m, std::abs(f(i, j)));
    }
  }
  return m;
}

template <class Pred>
[[nodiscard]] double max_abs_where(const ScalarField& f, Pred&& keep) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      if (keep(i, j)) m = std::max(m, std::abs(f(i, j)));
    }
  }
  return m;
}

[[nodiscard]] inline double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

[[nodiscard]] inline ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "field sum");
  ScalarField out = a;
  for (std::size_t k = 0; k < out.values().size(); ++k) out[k] += b[k];
  return out;
}

[[nodiscard]] inline ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "field difference");
  ScalarField out = a;
  for (std::size_t k = 0; k < out.values().size(); ++k) out[k] -= b[k];
  return out;
}

[[nodiscard]] inline ScalarField operator*(double s, const ScalarField& a) {
  ScalarField out = a;
  for (double& v : out.values()) v *= s;
  return out;
}

}  // namespace eulerlab
