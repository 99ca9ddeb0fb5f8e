#pragma once

// Planar slow-fast systems
//
//     eps * dx/dtau = F(x, y),   dy/dtau = G(x, y)        (slow time tau)
//           dx/dt   = F(x, y),   dy/dt   = eps * G(x, y)  (fast time t = tau / eps)
//
// plus the critical-manifold geometry of the van der Pol instance
// F = x - x^3/3 + y, G = -x.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <numbers>
#include <utility>

#include "koopman_sp/types.hpp"

namespace koopman_sp {

/// Partial derivatives of (F, G) at a point.
struct Jacobian {
  double Fx = 0.0, Fy = 0.0, Gx = 0.0, Gy = 0.0;
};

template <class S>
concept SlowFastSystem = requires(const S& sys, double x, double y) {
  { sys.epsilon() } -> std::convertible_to<double>;
  { sys.F(x, y) } -> std::convertible_to<double>;
  { sys.G(x, y) } -> std::convertible_to<double>;
  { sys.jacobian(x, y) } -> std::same_as<Jacobian>;
};

/// The built-in instance. Odd: (x, y) -> (-x, -y) maps the field to its negative.
class VanDerPol {
 public:
  explicit VanDerPol(double epsilon) : epsilon_(epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw DomainError("van der Pol epsilon must be positive and finite");
    }
  }

  double epsilon() const { return epsilon_; }
  static double F(double x, double y) { return x - x * x * x / 3.0 + y; }
  static double G(double x, double /*y*/) { return -x; }
  static Jacobian jacobian(double x, double /*y*/) { return {1.0 - x * x, 1.0, -1.0, 0.0}; }

 private:
  double epsilon_;
};

/// Any planar slow-fast pair given as callables. Without an explicit Jacobian
/// the partials are taken by central differences.
class GenericSystem {
 public:
  using ScalarFn = std::function<double(double, double)>;
  using JacobianFn = std::function<Jacobian(double, double)>;

  GenericSystem(ScalarFn F, ScalarFn G, double epsilon, JacobianFn jac = {})
      : F_(std::move(F)), G_(std::move(G)), jac_(std::move(jac)), epsilon_(epsilon) {
    if (!F_ || !G_) throw DomainError("generic system needs both F and G");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
      throw DomainError("epsilon must be positive and finite");
    }
  }

  double epsilon() const { return epsilon_; }
  double F(double x, double y) const { return F_(x, y); }
  double G(double x, double y) const { return G_(x, y); }

  Jacobian jacobian(double x, double y) const {
    if (jac_) return jac_(x, y);
    const double hx = 1e-6 * std::max(1.0, std::abs(x));
    const double hy = 1e-6 * std::max(1.0, std::abs(y));
    return {(F_(x + hx, y) - F_(x - hx, y)) / (2 * hx), (F_(x, y + hy) - F_(x, y - hy)) / (2 * hy),
            (G_(x + hx, y) - G_(x - hx, y)) / (2 * hx), (G_(x, y + hy) - G_(x, y - hy)) / (2 * hy)};
  }

 private:
  ScalarFn F_, G_;
  JacobianFn jac_;
  double epsilon_;
};

/// Right-hand side in the requested time scale: Fast -> (F, eps G), Slow -> (F / eps, G).
template <SlowFastSystem Sys>
State eval_vector_field(const Sys& sys, State s, TimeScale scale) {
  const double f = sys.F(s.x, s.y);
  const double g = sys.G(s.x, s.y);
  const double eps = sys.epsilon();
  const State v = scale == TimeScale::Fast ? State{f, eps * g} : State{f / eps, g};
  if (!v.finite()) throw EvaluationError(s);
  return v;
}

/// Divergence of the slow-time field, (1/eps) dF/dx + dG/dy.
template <SlowFastSystem Sys>
double slow_divergence(const Sys& sys, State s) {
  const Jacobian j = sys.jacobian(s.x, s.y);
  return j.Fx / sys.epsilon() + j.Gy;
}

// ---------------------------------------------------------------------------
// van der Pol critical manifold W = {F = 0} = {y = x^3/3 - x}.

inline constexpr double kFoldY = 2.0 / 3.0;

/// Tolerance of the repelling-branch band in classify_region.
inline constexpr double kW0Tolerance = 1e-9;

enum class ManifoldBranch { WMinus, WZero, WPlus };

inline const char* to_string(ManifoldBranch b) {
  switch (b) {
    case ManifoldBranch::WMinus: return "W-";
    case ManifoldBranch::WZero: return "W0";
    case ManifoldBranch::WPlus: return "W+";
  }
  return "?";
}

enum class Region { DMinus, DPlus, OnW0 };

inline const char* to_string(Region r) {
  switch (r) {
    case Region::DMinus: return "D-";
    case Region::DPlus: return "D+";
    case Region::OnW0: return "W0";
  }
  return "?";
}

namespace detail {

// Roots of x^3 - 3x - 3y = 0 for y >= 0. The negative half follows from oddness,
// which makes gamma_-(y) = -gamma_+(-y) and gamma_0(-y) = -gamma_0(y) hold bit-exactly.
inline double upper_root_nonneg(double y) {
  const double c = 1.5 * y;
  if (c > 1.0) return 2.0 * std::cosh(std::acosh(c) / 3.0);
  return 2.0 * std::cos(std::acos(c) / 3.0);
}

inline double middle_root_nonneg(double y) {
  const double c = std::min(1.5 * y, 1.0);
  return 2.0 * std::cos(std::acos(c) / 3.0 - 2.0 * std::numbers::pi / 3.0);
}

// Newton step on x^3 - 3x - 3y, kept only if it stays inside [lo, hi] and
// does not increase the residual. Skipped at the folds where p' = 0.
inline double polish(double x, double y, double lo, double hi) {
  const double p = x * x * x - 3.0 * x - 3.0 * y;
  const double dp = 3.0 * x * x - 3.0;
  if (std::abs(dp) < 1e-8) return x;
  const double xn = x - p / dp;
  if (!(xn >= lo && xn <= hi)) return x;
  const double pn = xn * xn * xn - 3.0 * xn - 3.0 * y;
  return std::abs(pn) <= std::abs(p) ? xn : x;
}

inline double upper_root_polished(double y) {
  const double inf = std::numeric_limits<double>::infinity();
  return polish(upper_root_nonneg(y), y, 1.0, inf);
}

}  // namespace detail

/// Branch graph including the fold endpoints: gamma_+(-2/3) = 1 and
/// gamma_-(2/3) = -1 are the singular points J+ and J-.
inline double gamma_closure(ManifoldBranch branch, double y) {
  switch (branch) {
    case ManifoldBranch::WPlus:
      if (!(y >= -kFoldY)) throw DomainError("gamma_+: y must be >= -2/3");
      if (y >= 0.0) return detail::upper_root_polished(y);
      // 3 real roots for y in [-2/3, 0); upper one via the cosine branch k = 0
      return detail::polish(2.0 * std::cos(std::acos(std::max(1.5 * y, -1.0)) / 3.0), y, 1.0, 2.0);
    case ManifoldBranch::WMinus:
      if (!(y <= kFoldY)) throw DomainError("gamma_-: y must be <= 2/3");
      return -gamma_closure(ManifoldBranch::WPlus, -y);
    case ManifoldBranch::WZero:
      if (!(std::abs(y) <= kFoldY)) throw DomainError("gamma_0: |y| must be <= 2/3");
      if (y >= 0.0) return detail::polish(detail::middle_root_nonneg(y), y, -1.0, 1.0);
      return -detail::polish(detail::middle_root_nonneg(-y), -y, -1.0, 1.0);
  }
  throw DomainError("unknown branch");
}

/// Root of x^3 - 3x - 3y = 0 on the open branch: W- (y < 2/3, x < -1),
/// W0 (|y| <= 2/3, |x| <= 1), W+ (y > -2/3, x > 1).
inline double gamma(ManifoldBranch branch, double y) {
  if (!std::isfinite(y)) throw DomainError("gamma: y must be finite");
  switch (branch) {
    case ManifoldBranch::WPlus:
      if (!(y > -kFoldY)) throw DomainError("gamma(W+, y): requires y > -2/3");
      break;
    case ManifoldBranch::WMinus:
      if (!(y < kFoldY)) throw DomainError("gamma(W-, y): requires y < 2/3");
      break;
    case ManifoldBranch::WZero:
      if (!(std::abs(y) <= kFoldY)) throw DomainError("gamma(W0, y): requires |y| <= 2/3");
      break;
  }
  return gamma_closure(branch, y);
}

/// D+ / D- partition of the plane off the repelling branch W0. The half-lines
/// B- = {x < -1, y = 2/3} and B+ = {x > 1, y = -2/3} belong to D- and D+.
inline Region classify_region(State s) {
  if (s.y > kFoldY) return Region::DPlus;
  if (s.y < -kFoldY) return Region::DMinus;
  const double x0 = gamma_closure(ManifoldBranch::WZero, s.y);
  if (std::abs(s.x - x0) <= kW0Tolerance) return Region::OnW0;
  return s.x > x0 ? Region::DPlus : Region::DMinus;
}

/// A point on W- or W+. The slow coordinate is always derived from xbar.
/// |xbar| == 1 marks a singular point, reachable only as the projection of B-/B+.
class ConstrainedState {
 public:
  ConstrainedState(ManifoldBranch branch, double xbar) : branch_(branch), xbar_(xbar) {
    if (branch == ManifoldBranch::WPlus) {
      if (!(xbar >= 1.0) || !std::isfinite(xbar)) throw DomainError("W+ state needs xbar > 1");
    } else if (branch == ManifoldBranch::WMinus) {
      if (!(xbar <= -1.0) || !std::isfinite(xbar)) throw DomainError("W- state needs xbar < -1");
    } else {
      throw DomainError("constrained states live on W- or W+ only");
    }
  }

  /// Branch chosen from the sign of xbar.
  static ConstrainedState on_manifold(double xbar) {
    return {xbar > 0 ? ManifoldBranch::WPlus : ManifoldBranch::WMinus, xbar};
  }

  ManifoldBranch branch() const { return branch_; }
  double xbar() const { return xbar_; }
  double ybar() const { return xbar_ * xbar_ * xbar_ / 3.0 - xbar_; }
  State to_state() const { return {xbar_, ybar()}; }
  bool at_singular_point() const { return std::abs(xbar_) == 1.0; }
  /// +1 on W+, -1 on W-.
  int sign() const { return branch_ == ManifoldBranch::WPlus ? 1 : -1; }

  friend bool operator==(const ConstrainedState&, const ConstrainedState&) = default;

 private:
  ManifoldBranch branch_;
  double xbar_;
};

/// pi: slide along constant y onto the attracting branch of the state's region.
inline ConstrainedState project_pi(State s) {
  if (!s.finite()) throw DomainError("project_pi: non-finite state");
  // states already on W- / W+ map to themselves bit for bit
  if (std::abs(s.x) >= 1.0 && s.x * s.x * s.x / 3.0 - s.x == s.y) return ConstrainedState::on_manifold(s.x);
  switch (classify_region(s)) {
    case Region::DPlus: return {ManifoldBranch::WPlus, gamma_closure(ManifoldBranch::WPlus, s.y)};
    case Region::DMinus: return {ManifoldBranch::WMinus, gamma_closure(ManifoldBranch::WMinus, s.y)};
    case Region::OnW0: break;
  }
  throw ProjectionUndefined(s);
}

}  // namespace koopman_sp
