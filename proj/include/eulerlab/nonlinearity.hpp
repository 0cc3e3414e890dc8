#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace eulerlab {

enum class Family { Arctan, AllenCahn, Sign, Custom };

constexpr std::string_view to_string(Family family) {
  switch (family) {
    case Family::Arctan: return "ArctanFamily";
    case Family::AllenCahn: return "AllenCahn";
    case Family::Sign: return "SignFunction";
    case Family::Custom: return "Custom";
  }
  return "Unknown";
}

/// The triple (f, f', F) driving -Lap u = f(u), with F' = f and F(0) = 0.
/// Built-in families evaluate in the caller's floating type so the 1D
/// solvers can run in extended precision.
class Nonlinearity {
 public:
  using Fn = std::function<double(double)>;

  /// f(s) = lambda * atan(s). Any lambda > 0 is accepted here; the strip
  /// solvers reject lambda too small to admit a positive subsolution.
  static Nonlinearity arctan(double lambda) {
    require(lambda > 0.0 && std::isfinite(lambda), ErrorCode::InvalidArgument, "lambda must be positive");
    Nonlinearity nl(Family::Arctan);
    nl.lambda_ = lambda;
    nl.bound_M_ = lambda * std::numbers::pi / 2.0;
    return nl;
  }

  /// f(s) = s - s^3. bound_M is the bound on [-1, 1], the range the
  /// saddle and heteroclinic solvers work in.
  static Nonlinearity allen_cahn() {
    Nonlinearity nl(Family::AllenCahn);
    nl.bound_M_ = 2.0 / (3.0 * std::sqrt(3.0));
    return nl;
  }

  /// f(s) = sigma * sgn(s), F(s) = sigma * |s|. sigma = -1 expresses
  /// Lap u = sgn(u) in the form -Lap u = f(u).
  static Nonlinearity sign(double sigma = 1.0) {
    Nonlinearity nl(Family::Sign);
    nl.sigma_ = sigma;
    nl.bound_M_ = std::abs(sigma);
    return nl;
  }

  /// Linear source f(s) = k s.
  static Nonlinearity linear(double k) {
    return custom([k](double s) { return k * s; }, [k](double) { return k; },
                  [k](double s) { return 0.5 * k * s * s; }, HUGE_VAL, "linear");
  }

  static Nonlinearity zero() {
    return custom([](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }, 0.0, "zero");
  }

  static Nonlinearity custom(Fn f, Fn f_prime, Fn F, double bound_M, std::string name = "custom") {
    Nonlinearity nl(Family::Custom);
    nl.f_ = std::move(f);
    nl.f_prime_ = std::move(f_prime);
    nl.F_ = std::move(F);
    nl.bound_M_ = bound_M;
    nl.name_ = std::move(name);
    return nl;
  }

  template <class T>
  [[nodiscard]] T f(T s) const {
    switch (family_) {
      case Family::Arctan: return static_cast<T>(lambda_) * std::atan(s);
      case Family::AllenCahn: return s - s * s * s;
      case Family::Sign: return s > 0 ? static_cast<T>(sigma_) : (s < 0 ? -static_cast<T>(sigma_) : T(0));
      case Family::Custom: return static_cast<T>(f_(static_cast<double>(s)));
    }
    return T(0);
  }

  template <class T>
  [[nodiscard]] T f_prime(T s) const {
    switch (family_) {
      case Family::Arctan: return static_cast<T>(lambda_) / (T(1) + s * s);
      case Family::AllenCahn: return T(1) - T(3) * s * s;
      case Family::Sign: return T(0);
      case Family::Custom: return static_cast<T>(f_prime_(static_cast<double>(s)));
    }
    return T(0);
  }

  template <class T>
  [[nodiscard]] T F(T s) const {
    switch (family_) {
      case Family::Arctan:
        return static_cast<T>(lambda_) * (s * std::atan(s) - T(0.5) * std::log1p(s * s));
      case Family::AllenCahn: return T(0.5) * s * s - T(0.25) * s * s * s * s;
      case Family::Sign: return static_cast<T>(sigma_) * std::abs(s);
      case Family::Custom: return static_cast<T>(F_(static_cast<double>(s)));
    }
    return T(0);
  }

  [[nodiscard]] Family family() const { return family_; }
  [[nodiscard]] double lambda() const { return lambda_; }
  [[nodiscard]] double bound_M() const { return bound_M_; }
  [[nodiscard]] std::string tag() const {
    switch (family_) {
      case Family::Arctan: return "ArctanFamily(" + format_number(lambda_) + ")";
      case Family::Sign: return "SignFunction(" + format_number(sigma_) + ")";
      case Family::Custom: return "Custom(" + name_ + ")";
      default: return std::string(to_string(family_));
    }
  }

  /// max |f'| over [lo, hi], by sampling plus the endpoints.
  [[nodiscard]] double max_abs_f_prime(double lo, double hi, int samples = 2048) const {
    double m = 0.0;
    for (int k = 0; k <= samples; ++k) {
      double s = lo + (hi - lo) * k / samples;
      m = std::max(m, std::abs(f_prime(s)));
    }
    return m;
  }

 private:
  explicit Nonlinearity(Family family) : family_(family) {}

  static std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
  }

  Family family_;
  double lambda_ = 0.0;
  double sigma_ = 1.0;
  double bound_M_ = 0.0;
  Fn f_;
  Fn f_prime_;
  Fn F_;
  std::string name_;
};

struct HypothesisCheck {
  bool odd = true;
  bool bounded = true;
  bool slope_above_threshold = true;
  bool ratio_decreasing = true;
  [[nodiscard]] bool all() const { return odd && bounded && slope_above_threshold && ratio_decreasing; }
};

/// Sampled check of: f odd, |f| <= M, f'(0) > pi^2/4 and f(s)/s strictly
/// decreasing on (0, s_max].
inline HypothesisCheck check_strip_hypotheses(const Nonlinearity& nl, double s_max = 20.0, int samples = 4000) {
  HypothesisCheck out;
  double prev_ratio = HUGE_VAL;
  for (int k = 1; k <= samples; ++k) {
    double s = s_max * k / samples;
    double fs = nl.f(s);
    if (std::abs(fs + nl.f(-s)) > 1e-12 * (1.0 + std::abs(fs))) out.odd = false;
    if (std::abs(fs) > nl.bound_M() * (1.0 + 1e-12)) out.bounded = false;
    double ratio = fs / s;
    if (!(ratio < prev_ratio)) out.ratio_decreasing = false;
    prev_ratio = ratio;
  }
  out.slope_above_threshold = nl.f_prime(0.0) > std::numbers::pi * std::numbers::pi / 4.0;
  return out;
}

}  // namespace eulerlab
