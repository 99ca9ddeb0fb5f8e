#pragma once

// Singular limit of the van der Pol system: the constrained flow on W- / W+ with
// jumps at the fold points, the fast layer flow, the concatenated flow, and the
// analytic principal eigenfunctions with numerical checks of their properties.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <optional>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "koopman_sp/constants.hpp"
#include "koopman_sp/model.hpp"
#include "koopman_sp/ode.hpp"

namespace koopman_sp {

namespace detail {

// ln x - x^2/2 on the closed half-line x >= 1.
inline double varphi_closed(double x) { return std::log(x) - 0.5 * x * x; }

// Inverse on v <= -1/2, no range check.
inline double varphi_inverse_unchecked(double v) {
  if (v >= -0.5) return 1.0;
  // absolute 1e-13 unless rounding in phi itself is larger
  const double tol = std::max(1e-13, 8.0 * std::numeric_limits<double>::epsilon() * std::abs(v));
  // near 1: phi(1 + d) ~ -1/2 - d^2; far out: phi(x) ~ -x^2/2
  double lo = 1.0;
  double hi = std::max(2.0, std::sqrt(-2.0 * v) + 2.0);
  while (varphi_closed(hi) > v) hi *= 2.0;
  double x = std::clamp(std::max(1.0 + std::sqrt(-0.5 - v), std::sqrt(-2.0 * v)), lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double f = varphi_closed(x) - v;
    if (std::abs(f) < tol) return x;
    // phi is decreasing: f > 0 means x is left of the root
    if (f > 0) lo = x;
    else hi = x;
    const double df = 1.0 / x - x;
    double next = df != 0.0 ? x - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x || hi - lo <= 4 * std::numeric_limits<double>::epsilon() * hi) return next;
    x = next;
  }
  return x;
}

}  // namespace detail

/// phi(x) = ln x - x^2/2 for x > 1; strictly decreasing from -1/2.
inline double varphi(double xbar) {
  if (!(xbar > 1.0) || !std::isfinite(xbar)) throw DomainError("varphi needs xbar > 1");
  return detail::varphi_closed(xbar);
}

/// Root x >= 1 of phi(x) = v for v <= -1/2; v = -1/2 gives 1.
inline double varphi_inverse(double v) {
  if (std::isnan(v)) throw DomainError("varphi_inverse: argument is NaN");
  if (v > -0.5) throw RangeError("varphi_inverse needs v <= -1/2");
  if (std::isinf(v)) throw RangeError("varphi_inverse: argument is infinite");
  return detail::varphi_inverse_unchecked(v);
}

/// Slow time left before the state reaches its fold point, phi(1) - phi(|xbar|).
inline double time_to_jump(const ConstrainedState& cs) {
  return -0.5 - detail::varphi_closed(std::abs(cs.xbar()));
}

/// Constrained flow on W- / W+. A state reaching a fold point jumps to the drop
/// point on the other branch; at the jump instant the post-jump state is returned.
inline ConstrainedState constrained_flow(const ConstrainedState& cs, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("constrained_flow needs finite tau >= 0");
  if (tau == 0.0) return cs;
  const double a = std::abs(cs.xbar());
  const double ts = time_to_jump(cs);
  const int s = cs.sign();
  // times within rounding of a jump instant count as the instant itself
  const double snap = 8.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, tau);
  if (tau < ts - snap) {
    return ConstrainedState::on_manifold(s * detail::varphi_inverse_unchecked(detail::varphi_closed(a) + tau));
  }
  const double half = SingularConstants::half_T0();
  const double r = std::max(0.0, tau - ts);
  double n = std::floor(r / half);
  double u = r - n * half;
  if (u < 0) {
    u += half;
    n -= 1;
  }
  if (u >= half - snap) {
    u = std::max(0.0, u - half);
    n += 1;
  }
  const int flips = static_cast<int>(std::fmod(n + 1.0, 2.0));
  const int sign = flips ? -s : s;
  const double v = std::min(-0.5, detail::varphi_closed(2.0) + u);
  return ConstrainedState::on_manifold(sign * detail::varphi_inverse_unchecked(v));
}

/// Layer problem x' = F(x, y) at frozen y, in fast time.
inline double fast_subsystem_flow(double x0, double y, double t, const IntegratorConfig& cfg = {}) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("fast_subsystem_flow needs finite t >= 0");
  if (!std::isfinite(x0) || !std::isfinite(y)) throw DomainError("fast_subsystem_flow: non-finite state");
  if (classify_region({x0, y}) == Region::OnW0) {
    throw DomainError("fast_subsystem_flow: start lies on the repelling branch");
  }
  Vec<1> x{x0};
  integrate_ode<1>([y](double, const Vec<1>& u) -> Vec<1> { return {VanDerPol::F(u[0], y)}; }, 0.0, x, t, cfg,
                   [&](const DenseSegment<1>& seg) {
                     x = seg.end();
                     return true;
                   });
  return x[0];
}

/// Concatenated singular flow: identity at tau = 0, otherwise project onto
/// W- / W+ and follow the constrained flow.
inline State singular_flow(State s, double tau) {
  if (!(tau >= 0.0) || !std::isfinite(tau)) throw DomainError("singular_flow needs finite tau >= 0");
  const ConstrainedState p = project_pi(s);
  if (tau == 0.0) return s;
  return constrained_flow(p, tau).to_state();
}

/// +-exp(i omega0 phi(|xbar|)) on W+ / W-.
inline std::complex<double> slow_eigenfunction(const ConstrainedState& cs) {
  const std::complex<double> e =
      std::polar(1.0, SingularConstants::omega0() * detail::varphi_closed(std::abs(cs.xbar())));
  return cs.sign() > 0 ? e : -e;
}

/// Eigenfunction of the concatenated flow: constant along the fibers of pi.
inline std::complex<double> singular_eigenfunction(State s) { return slow_eigenfunction(project_pi(s)); }

// ---------------------------------------------------------------------------
// Spectrum check

struct SpectrumReport {
  int n = 0;
  std::complex<double> eigenvalue;
  double max_eigen_residual = 0.0;
  double max_periodicity_residual = 0.0;
  double eigen_tolerance = 1e-9;
  double periodicity_tolerance = 1e-12;
  std::size_t checks = 0;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

/// Draws random constrained states with 1 < |xbar| <= 3 on either branch.
inline std::vector<ConstrainedState> sample_constrained_states(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(1.0, 3.0);
  std::bernoulli_distribution plus(0.5);
  std::vector<ConstrainedState> out;
  out.reserve(count);
  while (out.size() < count) {
    const double a = mag(rng);
    if (a == 1.0) continue;
    out.push_back(ConstrainedState::on_manifold(plus(rng) ? a : -a));
  }
  return out;
}

/// Checks that the n-th power of the slow eigenfunction is an eigenfunction with
/// eigenvalue i n omega0, and that the constrained flow is T0-periodic after the
/// first jump.
inline SpectrumReport spectrum_check(int n, std::size_t sample_count, const std::vector<double>& tau_list,
                                     std::uint64_t seed = 7) {
  SpectrumReport rep;
  rep.n = n;
  rep.eigenvalue = {0.0, n * SingularConstants::omega0()};
  const double T0 = SingularConstants::T0();
  for (const ConstrainedState& cs : sample_constrained_states(sample_count, seed)) {
    const std::complex<double> f0 = std::pow(slow_eigenfunction(cs), n);
    for (double tau : tau_list) {
      const std::complex<double> f1 = std::pow(slow_eigenfunction(constrained_flow(cs, tau)), n);
      const double res = std::abs(f1 - std::exp(rep.eigenvalue * tau) * f0);
      rep.max_eigen_residual = std::max(rep.max_eigen_residual, res);
      ++rep.checks;
      if (!(res < rep.eigen_tolerance)) {
        rep.failures.push_back("eigen-relation n=" + std::to_string(n) + " xbar=" + std::to_string(cs.xbar()) +
                               " tau=" + std::to_string(tau) + " residual=" + std::to_string(res));
      }
      const double t = time_to_jump(cs) + tau;
      const ConstrainedState a = constrained_flow(cs, t);
      const ConstrainedState b = constrained_flow(cs, t + T0);
      const double per = a.branch() == b.branch() ? std::abs(a.xbar() - b.xbar()) : INFINITY;
      rep.max_periodicity_residual = std::max(rep.max_periodicity_residual, per);
      ++rep.checks;
      if (!(per <= rep.periodicity_tolerance)) {
        rep.failures.push_back("periodicity xbar=" + std::to_string(cs.xbar()) + " tau=" + std::to_string(t) +
                               " residual=" + std::to_string(per));
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Observables on W- / W+ with matched limits (the class closed under the
// constrained Koopman operators).

namespace detail {

// Limit of g(h) as h -> 0+ from samples at the offsets below, assuming an
// expansion in powers of sqrt(h) (the approach speed to a fold point is sqrt-like).
inline constexpr std::array<double, 4> kLimitOffsets = {1e-3, 1e-4, 1e-5, 1e-6};

// Level k of the table removes the h^(k/2) term.
inline std::complex<double> richardson_limit(std::array<std::complex<double>, kLimitOffsets.size()> g) {
  for (std::size_t k = 1; k < g.size(); ++k) {
    const double r = std::pow(10.0, 0.5 * static_cast<double>(k)) - 1.0;
    for (std::size_t j = g.size() - 1; j >= k; --j) g[j] = g[j] + (g[j] - g[j - 1]) / r;
  }
  return g.back();
}

template <class Fn>
std::complex<double> one_sided_limit(Fn&& g) {
  std::array<std::complex<double>, kLimitOffsets.size()> v;
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = g(kLimitOffsets[k]);
  return richardson_limit(v);
}

}  // namespace detail

class ObservableSample {
 public:
  using Fn = std::function<std::complex<double>(const ConstrainedState&)>;

  /// `limit_minus` is the limit on W- at J- = (-1, 2/3), `limit_plus` the limit
  /// on W+ at J+ = (1, -2/3). Throws DomainError unless the function is
  /// continuous on each branch and the limits match the drop-point values.
  ObservableSample(Fn f, std::complex<double> limit_minus, std::complex<double> limit_plus,
                   double tolerance = 1e-6)
      : f_(std::move(f)), limit_minus_(limit_minus), limit_plus_(limit_plus), tol_(tolerance) {
    if (!f_) throw DomainError("observable needs a function");
    const auto at_drop_plus = (*this)(ConstrainedState(ManifoldBranch::WPlus, 2.0));
    const auto at_drop_minus = (*this)(ConstrainedState(ManifoldBranch::WMinus, -2.0));
    if (!(std::abs(limit_minus_ - at_drop_plus) <= tol_)) {
      throw DomainError("observable: limit at J- differs from the value at the drop point (2, 2/3)");
    }
    if (!(std::abs(limit_plus_ - at_drop_minus) <= tol_)) {
      throw DomainError("observable: limit at J+ differs from the value at the drop point (-2, -2/3)");
    }
    for (int s : {1, -1}) {
      const std::complex<double> stated = s > 0 ? limit_plus_ : limit_minus_;
      const std::complex<double> num =
          detail::one_sided_limit([&](double h) { return (*this)(ConstrainedState::on_manifold(s * (1.0 + h))); });
      if (!(std::abs(num - stated) <= tol_)) {
        throw DomainError(std::string("observable: stated limit at ") + (s > 0 ? "J+" : "J-") +
                          " does not match the numerical approach");
      }
      if (auto where = find_discontinuity(s)) {
        throw DomainError("observable is discontinuous near xbar = " + std::to_string(*where));
      }
    }
  }

  std::complex<double> operator()(const ConstrainedState& cs) const {
    const std::complex<double> v = f_(cs);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw EvaluationError(cs.to_state());
    }
    return v;
  }

  std::complex<double> limit_minus() const { return limit_minus_; }
  std::complex<double> limit_plus() const { return limit_plus_; }
  double tolerance() const { return tol_; }

  /// Upper end of the |xbar| range scanned for continuity.
  static constexpr double kScanMax = 5.0;

 private:
  // Scan (1, kScanMax] and chase every large increment by bisection; an
  // increment that survives down to width 1e-9 is a jump.
  std::optional<double> find_discontinuity(int s) const {
    constexpr int kCells = 4000;
    constexpr double kSuspicious = 1e-3;
    auto g = [&](double a) { return (*this)(ConstrainedState::on_manifold(s * a)); };
    const double a0 = 1.0 + 1e-7;
    const double step = (kScanMax - a0) / kCells;
    double lo = a0;
    std::complex<double> glo = g(lo);
    for (int k = 1; k <= kCells; ++k) {
      const double hi = k == kCells ? kScanMax : a0 + k * step;
      const std::complex<double> ghi = g(hi);
      if (std::abs(ghi - glo) > kSuspicious) {
        double l = lo, r = hi;
        std::complex<double> gl = glo, gr = ghi;
        while (r - l > 1e-9) {
          const double m = 0.5 * (l + r);
          const std::complex<double> gm = g(m);
          if (std::abs(gm - gl) >= std::abs(gr - gm)) {
            r = m;
            gr = gm;
          } else {
            l = m;
            gl = gm;
          }
        }
        if (std::abs(gr - gl) > tol_) return s * 0.5 * (l + r);
      }
      lo = hi;
      glo = ghi;
    }
    return std::nullopt;
  }

  Fn f_;
  std::complex<double> limit_minus_, limit_plus_;
  double tol_;
};

struct InvarianceReport {
  std::size_t loci_checked = 0;
  std::size_t loci_skipped = 0;  ///< loci too close to a fold point for the offsets
  double max_jump_mismatch = 0.0;
  double max_singular_mismatch = 0.0;
  double tolerance = 1e-6;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

/// For each tau, checks that g = f o constrained_flow(., tau) is again in the
/// class: one-sided limits of g agree at every starting point whose orbit hits a
/// fold exactly at tau, and the limits of g at J-/J+ equal g at the drop points.
inline InvarianceReport observable_invariance_check(const ObservableSample& f, const std::vector<double>& tau_list) {
  InvarianceReport rep;
  rep.tolerance = f.tolerance();
  const double half = SingularConstants::half_T0();
  const double min_gap = 20.0 * detail::kLimitOffsets[0];
  for (double tau : tau_list) {
    if (!(tau >= 0.0)) throw DomainError("observable_invariance_check needs tau >= 0");
    auto g = [&](double xbar) { return f(constrained_flow(ConstrainedState::on_manifold(xbar), tau)); };

    for (int n = 0; n * half <= tau; ++n) {
      const double slack = tau - n * half;
      const double a = detail::varphi_inverse_unchecked(-0.5 - slack);
      if (a - 1.0 < min_gap) {
        ++rep.loci_skipped;
        continue;
      }
      for (int s : {1, -1}) {
        const auto inner = detail::one_sided_limit([&](double h) { return g(s * (a - h)); });
        const auto outer = detail::one_sided_limit([&](double h) { return g(s * (a + h)); });
        const double d = std::abs(inner - outer);
        rep.max_jump_mismatch = std::max(rep.max_jump_mismatch, d);
        ++rep.loci_checked;
        if (!(d <= rep.tolerance)) {
          rep.failures.push_back("tau=" + std::to_string(tau) + ": one-sided limits differ by " + std::to_string(d) +
                                 " at xbar=" + std::to_string(s * a));
        }
      }
    }

    for (int s : {1, -1}) {
      const auto lim = detail::one_sided_limit([&](double h) { return g(s * (1.0 + h)); });
      const auto drop = g(-2.0 * s);
      const double d = std::abs(lim - drop);
      rep.max_singular_mismatch = std::max(rep.max_singular_mismatch, d);
      if (!(d <= rep.tolerance)) {
        rep.failures.push_back("tau=" + std::to_string(tau) + ": limit at " + (s > 0 ? "J+" : "J-") +
                               " differs from the drop-point value by " + std::to_string(d));
      }
    }
  }
  return rep;
}

}  // namespace koopman_sp
