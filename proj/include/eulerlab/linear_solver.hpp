#pragma once

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"

namespace eulerlab {

enum class LinearMethod { ConjugateGradient, SineTransform };

constexpr std::string_view to_string(LinearMethod method) {
  return method == LinearMethod::ConjugateGradient ? "ConjugateGradient" : "SineTransform";
}

struct LinearSolveStats {
  int iterations = 0;
  double relative_residual = 0.0;
};

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

inline void require_dirichlet_box(const Grid& grid) {
  require(!grid.periodic_x() && !grid.periodic_y(), ErrorCode::InvalidGrid,
          "the Dirichlet solver needs non-periodic axes");
}

/// rhs restricted to the interior, with the boundary data moved to the
/// right-hand side. Layout: interior row-major, (nx-2) fastest.
inline std::vector<double> interior_rhs(const Grid& g, const ScalarField& rhs, const ScalarField& dirichlet) {
  int m = g.nx() - 2;
  int k = g.ny() - 2;
  double ax = 1.0 / (g.hx() * g.hx());
  double ay = 1.0 / (g.hy() * g.hy());
  std::vector<double> b(static_cast<std::size_t>(m) * k);
  for (int j = 1; j <= k; ++j) {
    for (int i = 1; i <= m; ++i) {
      double value = rhs(i, j);
      if (i == 1) value += ax * dirichlet(0, j);
      if (i == m) value += ax * dirichlet(m + 1, j);
      if (j == 1) value += ay * dirichlet(i, 0);
      if (j == k) value += ay * dirichlet(i, k + 1);
      b[static_cast<std::size_t>(j - 1) * m + (i - 1)] = value;
    }
  }
  return b;
}

inline ScalarField assemble(const Grid& g, const std::vector<double>& interior, const ScalarField& dirichlet) {
  ScalarField out(g);
  int m = g.nx() - 2;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out(i, j) = g.is_boundary(i, j) ? dirichlet(i, j) : interior[static_cast<std::size_t>(j - 1) * m + (i - 1)];
    }
  }
  return out;
}

/// y = (-Lap_h + shift) x on the interior with homogeneous boundary values.
inline void apply_shifted(const Grid& g, double shift, const std::vector<double>& x, std::vector<double>& y) {
  int m = g.nx() - 2;
  int k = g.ny() - 2;
  double ax = 1.0 / (g.hx() * g.hx());
  double ay = 1.0 / (g.hy() * g.hy());
  double diag = 2.0 * ax + 2.0 * ay + shift;
  for (int j = 0; j < k; ++j) {
    for (int i = 0; i < m; ++i) {
      std::size_t c = static_cast<std::size_t>(j) * m + i;
      double s = diag * x[c];
      if (i > 0) s -= ax * x[c - 1];
      if (i < m - 1) s -= ax * x[c + 1];
      if (j > 0) s -= ay * x[c - m];
      if (j < k - 1) s -= ay * x[c + m];
      y[c] = s;
    }
  }
}

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += a[c] * b[c];
  return s;
}

inline std::vector<double> conjugate_gradient(const Grid& g, double shift, const std::vector<double>& b,
                                              double rel_tol, int max_iterations, LinearSolveStats* stats) {
  std::size_t n = b.size();
  std::vector<double> x(n, 0.0), r(b), p(b), ap(n);
  double b_norm = std::sqrt(dot(b, b));
  if (stats) *stats = {};
  if (b_norm == 0.0) return x;
  double rr = dot(r, r);
  for (int it = 1; it <= max_iterations; ++it) {
    apply_shifted(g, shift, p, ap);
    double alpha = rr / dot(p, ap);
    for (std::size_t c = 0; c < n; ++c) {
      x[c] += alpha * p[c];
      r[c] -= alpha * ap[c];
    }
    double rr_next = dot(r, r);
    double rel = std::sqrt(rr_next) / b_norm;
    if (rel < rel_tol) {
      if (stats) *stats = {it, rel};
      return x;
    }
    double beta = rr_next / rr;
    rr = rr_next;
    for (std::size_t c = 0; c < n; ++c) p[c] = r[c] + beta * p[c];
  }
  fail(ErrorCode::NonConvergence, "conjugate gradient did not reach relative residual " + std::to_string(rel_tol) +
                                      " in " + std::to_string(max_iterations) + " iterations");
}

}  // namespace detail

/// Direct solver for (-Lap_h + shift) w = rhs with Dirichlet data, by a
/// two-dimensional type-I discrete sine transform. The FFTW plan is built
/// once and reused across solves on the same grid.
class SineTransformSolver {
 public:
  SineTransformSolver(const Grid& grid, double shift) : grid_(grid), shift_(shift) {
    detail::require_dirichlet_box(grid);
    require(shift >= 0.0, ErrorCode::InvalidArgument, "shift must be nonnegative");
    m_ = grid.nx() - 2;
    k_ = grid.ny() - 2;
    std::size_t count = static_cast<std::size_t>(m_) * k_;
    buffer_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * count)));
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      plan_ = fftw_plan_r2r_2d(k_, m_, buffer_.get(), buffer_.get(), FFTW_RODFT00, FFTW_RODFT00, FFTW_ESTIMATE);
    }
    require(plan_ != nullptr, ErrorCode::InvalidArgument, "FFTW could not create a sine-transform plan");
    const double pi = std::numbers::pi;
    double ax = 1.0 / (grid.hx() * grid.hx());
    double ay = 1.0 / (grid.hy() * grid.hy());
    double norm = 4.0 * (m_ + 1.0) * (k_ + 1.0);
    inv_eigen_.resize(count);
    for (int q = 0; q < k_; ++q) {
      double ey = 2.0 * ay * (1.0 - std::cos(pi * (q + 1) / (k_ + 1.0)));
      for (int p = 0; p < m_; ++p) {
        double ex = 2.0 * ax * (1.0 - std::cos(pi * (p + 1) / (m_ + 1.0)));
        inv_eigen_[static_cast<std::size_t>(q) * m_ + p] = 1.0 / ((ex + ey + shift) * norm);
      }
    }
  }

  SineTransformSolver(const SineTransformSolver&) = delete;
  SineTransformSolver& operator=(const SineTransformSolver&) = delete;

  ~SineTransformSolver() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (plan_) fftw_destroy_plan(plan_);
  }

  [[nodiscard]] ScalarField solve(const ScalarField& rhs, const ScalarField& dirichlet) const {
    require_same_grid(grid_, rhs.grid(), "sine-transform solve");
    require_same_grid(grid_, dirichlet.grid(), "sine-transform solve");
    std::vector<double> b = detail::interior_rhs(grid_, rhs, dirichlet);
    double* buf = buffer_.get();
    std::copy(b.begin(), b.end(), buf);
    fftw_execute(plan_);
    for (std::size_t c = 0; c < b.size(); ++c) buf[c] *= inv_eigen_[c];
    fftw_execute(plan_);
    std::copy(buf, buf + b.size(), b.begin());
    return detail::assemble(grid_, b, dirichlet);
  }

  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] double shift() const { return shift_; }

 private:
  struct FftwFree {
    void operator()(double* p) const { fftw_free(p); }
  };

  Grid grid_;
  double shift_;
  int m_ = 0;
  int k_ = 0;
  std::unique_ptr<double, FftwFree> buffer_;
  fftw_plan plan_ = nullptr;
  std::vector<double> inv_eigen_;
};

/// Solves (-Lap_h + shift) w = rhs at interior nodes with w equal to the
/// boundary values of `dirichlet`. Conjugate gradient by default, to
/// relative residual 1e-12 within max_iterations (default 10 (nx + ny)).
[[nodiscard]] inline ScalarField linear_solve(const Grid& grid, double shift, const ScalarField& rhs,
                                              const ScalarField& dirichlet,
                                              LinearMethod method = LinearMethod::ConjugateGradient,
                                              LinearSolveStats* stats = nullptr, int max_iterations = 0) {
  detail::require_dirichlet_box(grid);
  require(shift >= 0.0, ErrorCode::InvalidArgument, "shift must be nonnegative");
  require_same_grid(grid, rhs.grid(), "linear_solve");
  require_same_grid(grid, dirichlet.grid(), "linear_solve");
  if (method == LinearMethod::SineTransform) {
    if (stats) *stats = {1, 0.0};
    return SineTransformSolver(grid, shift).solve(rhs, dirichlet);
  }
  if (max_iterations <= 0) max_iterations = 10 * (grid.nx() + grid.ny());
  std::vector<double> b = detail::interior_rhs(grid, rhs, dirichlet);
  std::vector<double> w = detail::conjugate_gradient(grid, shift, b, 1e-12, max_iterations, stats);
  return detail::assemble(grid, w, dirichlet);
}

}  // namespace eulerlab
