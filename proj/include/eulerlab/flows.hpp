#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "grid.hpp"
#include "nonlinearity.hpp"

namespace eulerlab {

enum class AnalyticFlowName { Couette, Poiseuille, Kolmogorov, ExponentialCounterexample, TaylorGreen, ExampleSignEq };

constexpr std::string_view to_string(AnalyticFlowName name) {
  switch (name) {
    case AnalyticFlowName::Couette: return "Couette";
    case AnalyticFlowName::Poiseuille: return "Poiseuille";
    case AnalyticFlowName::Kolmogorov: return "Kolmogorov";
    case AnalyticFlowName::ExponentialCounterexample: return "ExponentialCounterexample";
    case AnalyticFlowName::TaylorGreen: return "TaylorGreen";
    case AnalyticFlowName::ExampleSignEq: return "ExampleSignEq";
  }
  return "Unknown";
}

/// Accepts the enum spelling or the dashed lower-case form ("taylor-green").
inline AnalyticFlowName analytic_flow_from_string(std::string_view text) {
  auto squash = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c == '-' || c == '_') continue;
      out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
  };
  std::string key = squash(text);
  for (auto name : {AnalyticFlowName::Couette, AnalyticFlowName::Poiseuille, AnalyticFlowName::Kolmogorov,
                    AnalyticFlowName::ExponentialCounterexample, AnalyticFlowName::TaylorGreen,
                    AnalyticFlowName::ExampleSignEq}) {
    if (squash(to_string(name)) == key) return name;
  }
  if (key == "exponential" || key == "counterexample") return AnalyticFlowName::ExponentialCounterexample;
  if (key == "signeq" || key == "example19") return AnalyticFlowName::ExampleSignEq;
  fail(ErrorCode::InvalidArgument, "unknown catalog flow '" + std::string(text) + "'");
}

using Vec2 = std::array<double, 2>;
/// (dv1/dx, dv1/dy, dv2/dx, dv2/dy)
using Jacobian = std::array<double, 4>;

/// Closed-form evaluators attached to catalog flows.
struct AnalyticJet {
  std::function<double(double, double)> stream;
  std::function<Vec2(double, double)> velocity;
  std::function<Jacobian(double, double)> jacobian;
  std::function<double(double, double)> pressure;
  std::function<Vec2(double, double)> pressure_gradient;
  std::function<double(double, double)> vorticity;
};

struct Provenance {
  enum class Kind { FromStream, Analytic } kind = Kind::FromStream;
  std::string tag;
};

struct Flow {
  Grid grid;
  VectorField velocity;
  std::optional<ScalarField> pressure;
  ScalarField vorticity;
  Provenance provenance;
  std::vector<int> wall_rows;
  std::optional<ScalarField> stream;
  std::optional<AnalyticJet> analytic;
};

/// v = (-du/dy, du/dx), omega = Lap u. The stream function must be
/// constant along every wall row of the grid.
[[nodiscard]] inline Flow velocity_from_stream(const ScalarField& u, std::string tag = {}) {
  const Grid& g = u.grid();
  Flow flow;
  flow.grid = g;
  flow.wall_rows = g.wall_rows();
  for (int j : flow.wall_rows) {
    double lo = u(0, j);
    double hi = u(0, j);
    for (int i = 0; i < g.nx(); ++i) {
      lo = std::min(lo, u(i, j));
      hi = std::max(hi, u(i, j));
    }
    require(hi - lo <= 1e-10, ErrorCode::NonConstantWallTrace,
            "stream function varies by " + std::to_string(hi - lo) + " along wall row " + std::to_string(j));
  }
  flow.velocity = perp_gradient(u);
  flow.vorticity = laplacian(u);
  flow.provenance = {Provenance::Kind::FromStream, std::move(tag)};
  flow.stream = u;
  return flow;
}

/// P = -F(u) - |grad u|^2 / 2. With -Lap u = f(u) the pressure law reads
/// P = G(u) - |grad u|^2 / 2 with G' = -f, so G = -F for the stored
/// antiderivative F of f.
[[nodiscard]] inline ScalarField pressure_from_stream(const ScalarField& u, const Nonlinearity& nl) {
  VectorField grad = gradient(u);
  ScalarField p(u.grid());
  for (std::size_t k = 0; k < p.values().size(); ++k) {
    double gx = grad.u_values()[k];
    double gy = grad.v_values()[k];
    p[k] = -nl.F(u[k]) - 0.5 * (gx * gx + gy * gy);
  }
  return p;
}

/// velocity_from_stream plus pressure_from_stream.
[[nodiscard]] inline Flow flow_from_stream(const ScalarField& u, const Nonlinearity& nl) {
  Flow flow = velocity_from_stream(u, nl.tag());
  flow.pressure = pressure_from_stream(u, nl);
  return flow;
}

namespace detail {

inline AnalyticJet shear_jet(std::function<double(double)> s, std::function<double(double)> ds,
                             std::function<double(double)> stream) {
  AnalyticJet jet;
  jet.stream = [stream](double, double y) { return stream(y); };
  jet.velocity = [s](double, double y) { return Vec2{s(y), 0.0}; };
  jet.jacobian = [ds](double, double y) { return Jacobian{0.0, ds(y), 0.0, 0.0}; };
  jet.pressure = [](double, double) { return 0.0; };
  jet.pressure_gradient = [](double, double) { return Vec2{0.0, 0.0}; };
  jet.vorticity = [ds](double, double y) { return -ds(y); };
  return jet;
}

inline AnalyticJet catalog_jet(AnalyticFlowName name) {
  const double pi = std::numbers::pi;
  switch (name) {
    case AnalyticFlowName::Couette:
      return shear_jet([](double y) { return y; }, [](double) { return 1.0; },
                       [](double y) { return -0.5 * y * y; });
    case AnalyticFlowName::Poiseuille:
      return shear_jet([](double y) { return y * y; }, [](double y) { return 2.0 * y; },
                       [](double y) { return -y * y * y / 3.0; });
    case AnalyticFlowName::Kolmogorov:
      return shear_jet([pi](double y) { return std::sin(pi * y); }, [pi](double y) { return pi * std::cos(pi * y); },
                       [pi](double y) { return std::cos(pi * y) / pi; });
    case AnalyticFlowName::ExampleSignEq:
      return shear_jet([](double y) { return -std::abs(y); },
                       [](double y) { return y > 0 ? -1.0 : (y < 0 ? 1.0 : 0.0); },
                       [](double y) { return 0.5 * y * std::abs(y); });
    case AnalyticFlowName::ExponentialCounterexample: {
      AnalyticJet jet;
      jet.stream = [](double x, double y) { return y * std::exp(x); };
      jet.velocity = [](double x, double y) { return Vec2{-std::exp(x), y * std::exp(x)}; };
      jet.jacobian = [](double x, double y) {
        double e = std::exp(x);
        return Jacobian{-e, 0.0, y * e, e};
      };
      jet.pressure = [](double x, double) { return -0.5 * std::exp(2.0 * x); };
      jet.pressure_gradient = [](double x, double) { return Vec2{-std::exp(2.0 * x), 0.0}; };
      jet.vorticity = [](double x, double y) { return y * std::exp(x); };
      return jet;
    }
    case AnalyticFlowName::TaylorGreen: {
      AnalyticJet jet;
      jet.stream = [](double x, double y) { return std::sin(x) * std::sin(y); };
      jet.velocity = [](double x, double y) { return Vec2{-std::sin(x) * std::cos(y), std::cos(x) * std::sin(y)}; };
      jet.jacobian = [](double x, double y) {
        double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y);
        return Jacobian{-cx * cy, sx * sy, -sx * sy, cx * cy};
      };
      // -Lap u = 2u, so P = -u^2 - |grad u|^2 / 2.
      jet.pressure = [](double x, double y) {
        double sx = std::sin(x), cx = std::cos(x), sy = std::sin(y), cy = std::cos(y);
        return -sx * sx * sy * sy - 0.5 * (cx * cx * sy * sy + sx * sx * cy * cy);
      };
      jet.pressure_gradient = [](double x, double y) {
        return Vec2{-std::sin(x) * std::cos(x), -std::sin(y) * std::cos(y)};
      };
      jet.vorticity = [](double x, double y) { return -2.0 * std::sin(x) * std::sin(y); };
      return jet;
    }
  }
  fail(ErrorCode::InvalidArgument, "unknown catalog flow");
}

}  // namespace detail

/// Samples a catalog flow on the grid. Shear flows need a strip grid,
/// Taylor-Green needs a torus, the exponential flow any non-periodic grid.
[[nodiscard]] inline Flow analytic_flow(AnalyticFlowName name, const Grid& grid) {
  bool shear = name == AnalyticFlowName::Couette || name == AnalyticFlowName::Poiseuille ||
               name == AnalyticFlowName::Kolmogorov || name == AnalyticFlowName::ExampleSignEq;
  if (shear) {
    require(grid.kind() == DomainKind::StripTruncation, ErrorCode::IncompatibleGrid,
            std::string(to_string(name)) + " needs a strip grid");
  } else if (name == AnalyticFlowName::TaylorGreen) {
    require(grid.kind() == DomainKind::Torus, ErrorCode::IncompatibleGrid, "TaylorGreen needs a torus grid");
  } else {
    require(!grid.periodic_x() && !grid.periodic_y(), ErrorCode::IncompatibleGrid,
            "ExponentialCounterexample is not periodic");
  }
  AnalyticJet jet = detail::catalog_jet(name);
  Flow flow;
  flow.grid = grid;
  flow.velocity = sample_vector(grid, [&](double x, double y) { return jet.velocity(x, y); });
  flow.pressure = sample(grid, [&](double x, double y) { return jet.pressure(x, y); });
  flow.vorticity = sample(grid, [&](double x, double y) { return jet.vorticity(x, y); });
  flow.stream = sample(grid, [&](double x, double y) { return jet.stream(x, y); });
  flow.provenance = {Provenance::Kind::Analytic, std::string(to_string(name))};
  flow.wall_rows = grid.wall_rows();
  flow.analytic = std::move(jet);
  return flow;
}

/// v . grad v + grad P from the closed forms at (x, y).
[[nodiscard]] inline Vec2 analytic_momentum_residual(const AnalyticJet& jet, double x, double y) {
  Vec2 v = jet.velocity(x, y);
  Jacobian d = jet.jacobian(x, y);
  Vec2 gp = jet.pressure_gradient(x, y);
  return {v[0] * d[0] + v[1] * d[1] + gp[0], v[0] * d[2] + v[1] * d[3] + gp[1]};
}

struct EulerResidual {
  VectorField momentum;
  ScalarField divergence;
};

/// Finite-difference momentum residual v . grad v + grad P and div v.
/// Boundary nodes are set to zero.
[[nodiscard]] inline EulerResidual euler_residual(const Flow& flow) {
  require(flow.pressure.has_value(), ErrorCode::MissingPressure, "euler_residual needs a pressure field");
  const Grid& g = flow.grid;
  VectorField g1 = gradient(flow.velocity.first());
  VectorField g2 = gradient(flow.velocity.second());
  VectorField gp = gradient(*flow.pressure);
  ScalarField div = divergence(flow.velocity);
  VectorField mom(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      std::size_t k = g.index(i, j);
      if (g.is_boundary(i, j)) {
        div[k] = 0.0;
        continue;
      }
      double v1 = flow.velocity.u_values()[k];
      double v2 = flow.velocity.v_values()[k];
      mom.u_values()[k] = v1 * g1.u_values()[k] + v2 * g1.v_values()[k] + gp.u_values()[k];
      mom.v_values()[k] = v1 * g2.u_values()[k] + v2 * g2.v_values()[k] + gp.v_values()[k];
    }
  }
  return {std::move(mom), std::move(div)};
}

enum class Parity { odd, even };

/// Extends a field on x >= 0 (first column at x = 0) to the mirrored grid on
/// [-X, X]. Odd parity requires exact zeros on the x = 0 column.
[[nodiscard]] inline ScalarField odd_extend_x1(const ScalarField& f, Parity parity = Parity::odd,
                                               std::optional<DomainKind> kind = std::nullopt) {
  const Grid& g = f.grid();
  require(g.x_range().lo == 0.0 && !g.periodic_x(), ErrorCode::InvalidGrid, "half grid must start at x = 0");
  if (parity == Parity::odd) {
    for (int j = 0; j < g.ny(); ++j) {
      require(f(0, j) == 0.0, ErrorCode::ParityViolation,
              "odd extension needs f = 0 on x = 0 (found " + std::to_string(f(0, j)) + ")");
    }
  }
  DomainKind out_kind = kind.value_or(g.kind() == DomainKind::Quadrant ? DomainKind::HalfPlaneTruncation : g.kind());
  Grid full(2 * g.nx() - 1, g.ny(), {-g.x_range().hi, g.x_range().hi}, g.y_range(), out_kind, false, g.periodic_y());
  ScalarField out(full);
  double sign = parity == Parity::odd ? -1.0 : 1.0;
  int c = g.nx() - 1;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out(c + i, j) = f(i, j);
      out(c - i, j) = i == 0 ? f(0, j) : sign * f(i, j);
    }
  }
  return out;
}

/// Same construction across y = 0 (first row at y = 0).
[[nodiscard]] inline ScalarField reflect_x2(const ScalarField& f, Parity parity = Parity::odd,
                                            DomainKind kind = DomainKind::Plane) {
  const Grid& g = f.grid();
  require(g.y_range().lo == 0.0 && !g.periodic_y(), ErrorCode::InvalidGrid, "half grid must start at y = 0");
  if (parity == Parity::odd) {
    for (int i = 0; i < g.nx(); ++i) {
      require(f(i, 0) == 0.0, ErrorCode::ParityViolation, "odd reflection needs f = 0 on y = 0");
    }
  }
  Grid full(g.nx(), 2 * g.ny() - 1, g.x_range(), {-g.y_range().hi, g.y_range().hi}, kind, g.periodic_x(), false);
  ScalarField out(full);
  double sign = parity == Parity::odd ? -1.0 : 1.0;
  int c = g.ny() - 1;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out(i, c + j) = f(i, j);
      out(i, c - j) = j == 0 ? f(i, 0) : sign * f(i, j);
    }
  }
  return out;
}

/// Multiplies the velocity (and pressure, quadratically) by c.
[[nodiscard]] inline Flow scaled(const Flow& flow, double c) {
  Flow out = flow;
  for (double& v : out.velocity.u_values()) v *= c;
  for (double& v : out.velocity.v_values()) v *= c;
  for (double& v : out.vorticity.values()) v *= c;
  if (out.pressure) {
    for (double& v : out.pressure->values()) v *= c * c;
  }
  if (out.stream) {
    for (double& v : out.stream->values()) v *= c;
  }
  out.analytic.reset();
  return out;
}

/// Rotates every velocity sample by alpha. Positions are unchanged.
[[nodiscard]] inline Flow rotated_samples(const Flow& flow, double alpha) {
  Flow out = flow;
  double ca = std::cos(alpha);
  double sa = std::sin(alpha);
  auto& u = out.velocity.u_values();
  auto& v = out.velocity.v_values();
  for (std::size_t k = 0; k < u.size(); ++k) {
    double a = u[k];
    double b = v[k];
    u[k] = ca * a - sa * b;
    v[k] = sa * a + ca * b;
  }
  out.pressure.reset();
  out.stream.reset();
  out.analytic.reset();
  return out;
}

/// Mirror image under x2 -> -x2 for fields on a grid symmetric in y:
/// (v1, v2)(x1, x2) -> (v1, -v2)(x1, -x2).
[[nodiscard]] inline Flow reflected_x2(const Flow& flow) {
  const Grid& g = flow.grid;
  require(g.y_range().lo == -g.y_range().hi, ErrorCode::InvalidGrid, "reflection needs a y-symmetric grid");
  Flow out = flow;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      std::size_t src = g.index(i, g.ny() - 1 - j);
      std::size_t dst = g.index(i, j);
      out.velocity.u_values()[dst] = flow.velocity.u_values()[src];
      out.velocity.v_values()[dst] = -flow.velocity.v_values()[src];
      out.vorticity[dst] = -flow.vorticity[src];
      if (flow.pressure) (*out.pressure)[dst] = (*flow.pressure)[src];
      if (flow.stream) (*out.stream)[dst] = -(*flow.stream)[src];
    }
  }
  out.analytic.reset();
  return out;
}

}  // namespace eulerlab
