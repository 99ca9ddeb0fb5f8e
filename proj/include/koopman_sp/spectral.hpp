#pragma once

// Principal Koopman eigenfunctions of a planar limit cycle:
//   phase      phi_{i omega}(s) = exp(i theta(s)),   U_tau phi = exp(i omega tau) phi
//   amplitude  phi_nu(s) real, zero on the cycle,    U_tau phi = exp(nu tau) phi
// evaluated pointwise and on grids, plus finite-difference diagnostics.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "koopman_sp/cycle.hpp"
#include "koopman_sp/field.hpp"
#include "koopman_sp/model.hpp"
#include "koopman_sp/ode.hpp"
#include "koopman_sp/sweep.hpp"

namespace koopman_sp {

enum class PhaseMethod { TimeOfFlight, FourierAverage };

inline const char* to_string(PhaseMethod m) {
  return m == PhaseMethod::TimeOfFlight ? "time-of-flight" : "fourier-average";
}

struct SpectralOptions {
  /// Capture distance to the cycle; 0 selects 1e-6 for eps > 0.1 and 1e-7 below.
  double capture = 0.0;
  /// Capture distance for the amplitude, which reads the transverse offset
  /// itself and so needs it well above the integration error.
  double amplitude_capture = 1e-5;
  /// Tolerance caps for amplitude trajectories.
  double amplitude_rtol = 1e-11;
  double amplitude_atol = 1e-13;
  /// Step budget per evaluation; 0 selects 1e4 / eps.
  long max_steps = 0;
  /// Slow-time horizon per evaluation.
  double max_time = 500.0;
  /// Fourier average: periods per averaging window (two windows are used).
  int fourier_periods = 20;
  PhaseMethod method = PhaseMethod::TimeOfFlight;

  double capture_for(double eps) const {
    if (capture > 0.0) return capture;
    return eps > 0.1 ? 1e-6 : 1e-7;
  }
  long steps_for(double eps) const {
    if (max_steps > 0) return max_steps;
    return static_cast<long>(std::ceil(1e4 / eps));
  }
};

/// Nearest cycle point to a query state.
struct CycleMatch {
  double tau = 0.0;       ///< slow time since the anchor, in [0, T)
  double distance = 0.0;
  State point;
};

/// Limit cycle with the data needed to evaluate eigenfunctions near it.
template <SlowFastSystem Sys>
class CycleGeometry {
 public:
  CycleGeometry(Sys sys, LimitCycle cycle) : sys_(std::move(sys)), c_(std::move(cycle)) {
    if (c_.samples.size() < 4) throw DomainError("cycle needs at least 4 samples");
    const std::size_t n = c_.samples.size();
    h_ = c_.period / static_cast<double>(n);

    // D(tau) = int_0^tau (div f - nu), sampled at the cycle samples
    D_.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      D_[k + 1] = D_[k] + weight_integral(static_cast<double>(k) * h_, static_cast<double>(k + 1) * h_);
    }

    const State fa = eval_vector_field(sys_, c_.anchor, TimeScale::Slow);
    State centroid{0.0, 0.0};
    for (const State& p : c_.samples) centroid = centroid + (1.0 / static_cast<double>(n)) * p;
    // outward unit normal at the anchor is +-(-fy, fx)/|f|; choose the side away
    // from the centroid
    const State rot{-fa.y, fa.x};
    orientation_ = dot(rot, c_.anchor - centroid) >= 0.0 ? 1 : -1;
    log_norm_ = -std::log(norm(fa));

    // first Fourier coefficient of x + iy along the cycle, by the periodic
    // trapezoid rule on the samples
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
      const double th = c_.omega * static_cast<double>(k) * h_;
      acc += std::polar(1.0, -th) * std::complex<double>(c_.samples[k].x, c_.samples[k].y);
    }
    c1_ = acc / static_cast<double>(n);
  }

  const Sys& system() const { return sys_; }
  const LimitCycle& cycle() const { return c_; }
  /// Outward unit normal at the anchor.
  State anchor_normal() const {
    const State fa = eval_vector_field(sys_, c_.anchor, TimeScale::Slow);
    return (static_cast<double>(orientation_) / norm(fa)) * State{-fa.y, fa.x};
  }
  std::complex<double> fourier_coefficient() const { return c1_; }

  /// D(tau) = int_0^tau (div f - nu) dtau' for tau in [0, T].
  double weight(double tau) const {
    const std::size_t n = c_.samples.size();
    double k = std::floor(tau / h_);
    k = std::clamp(k, 0.0, static_cast<double>(n - 1));
    const double t0 = k * h_;
    return D_[static_cast<std::size_t>(k)] + weight_integral(t0, tau);
  }

  /// Coarse search over the samples; refined on the dense orbit when the query
  /// is within `refine_within` of the cycle.
  CycleMatch nearest(State p, double refine_within = std::numeric_limits<double>::infinity()) const {
    const std::size_t n = c_.samples.size();
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      const double dx = c_.samples[k].x - p.x;
      const double dy = c_.samples[k].y - p.y;
      const double d2 = dx * dx + dy * dy;
      if (d2 < best_d2) {
        best_d2 = d2;
        best = k;
      }
    }
    CycleMatch m{static_cast<double>(best) * h_, std::sqrt(best_d2), c_.samples[best]};
    if (!(m.distance <= refine_within)) return m;

    // golden-section search for min |c(tau) - p| over the two adjacent intervals
    auto d2 = [&](double tau) {
      const State q = c_.at(tau) - p;
      return q.x * q.x + q.y * q.y;
    };
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = m.tau - h_, b = m.tau + h_;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = d2(x1), f2 = d2(x2);
    for (int it = 0; it < 60; ++it) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = d2(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = d2(x2);
      }
    }
    double tau = 0.5 * (a + b);
    const double dt = d2(tau);
    if (dt < best_d2) {
      tau = std::fmod(tau, c_.period);
      if (tau < 0) tau += c_.period;
      m = {tau, std::sqrt(dt), c_.at(tau)};
    }
    return m;
  }

  /// Amplitude eigenfunction near the cycle from the linearization along the
  /// matched cycle point: log|phi| and sign.
  LogReal linear_amplitude(State p, const CycleMatch& m) const {
    const State f = eval_vector_field(sys_, m.point, TimeScale::Slow);
    const double q = orientation_ * cross(f, p - m.point);
    if (q == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    return {log_norm_ - weight(m.tau) + std::log(std::abs(q)), q > 0 ? 1 : -1};
  }

 private:
  // 5-point Gauss-Legendre on [a, b] of div f - nu along the orbit
  double weight_integral(double a, double b) const {
    static constexpr double xs[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                     0.9061798459386640};
    static constexpr double ws[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                     0.2369268850561891, 0.2369268850561891};
    if (b == a) return 0.0;
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
      acc += ws[i] * (slow_divergence(sys_, c_.orbit.at(std::clamp(mid + half * xs[i], 0.0, c_.period))) -
                      c_.floquet_nu);
    }
    return acc * half;
  }

  Sys sys_;
  LimitCycle c_;
  double h_ = 0.0;
  std::vector<double> D_;
  int orientation_ = 1;
  double log_norm_ = 0.0;
  std::complex<double> c1_{1.0, 0.0};
};

template <SlowFastSystem Sys>
CycleGeometry(Sys, LimitCycle) -> CycleGeometry<Sys>;

namespace detail {

template <SlowFastSystem Sys>
void reject_equilibrium(const Sys& sys, State s) {
  if (!s.finite()) throw DomainError("eigenfunction evaluation needs a finite state");
  const State v = eval_vector_field(sys, s, TimeScale::Fast);
  if (v.x == 0.0 && v.y == 0.0) throw DomainError("state " + to_string(s) + " is an equilibrium");
}

struct Capture {
  State point;
  CycleMatch match;
  double elapsed = 0.0;  ///< slow time
};

// Integrate until within `capture` of the cycle. Empty on budget exhaustion.
template <SlowFastSystem Sys>
std::optional<Capture> run_to_cycle(const CycleGeometry<Sys>& geo, State s, const IntegratorConfig& cfg,
                                    const SpectralOptions& opt, double capture) {
  const Sys& sys = geo.system();
  const double eps = sys.epsilon();
  const double coarse = 4.0 * geo.cycle().period / static_cast<double>(geo.cycle().samples.size()) *
                        std::max(1.0, 1.0 / eps);
  {
    const CycleMatch m = geo.nearest(s, coarse);
    if (m.distance < capture) return Capture{s, m, 0.0};
  }
  IntegratorConfig c = cfg;
  c.max_steps = std::min(cfg.max_steps, opt.steps_for(eps));
  std::optional<Capture> out;
  try {
    integrate_ode<2>(fast_rhs(sys), 0.0, Vec<2>{s.x, s.y}, opt.max_time / eps, c, [&](const DenseSegment<2>& seg) {
      const Vec<2> e = seg.end();
      const State p{e[0], e[1]};
      const CycleMatch m = geo.nearest(p, coarse);
      if (m.distance < capture) {
        out = Capture{p, m, seg.t1() * eps};
        return false;
      }
      return true;
    });
  } catch (const StiffnessError&) {
    return std::nullopt;
  } catch (const DivergenceError&) {
    return std::nullopt;
  }
  return out;
}

template <SlowFastSystem Sys>
std::optional<std::complex<double>> phase_fourier(const CycleGeometry<Sys>& geo, State s,
                                                  const IntegratorConfig& cfg, const SpectralOptions& opt) {
  const Sys& sys = geo.system();
  const LimitCycle& c = geo.cycle();
  const double eps = sys.epsilon();
  const double window = opt.fourier_periods * c.period;  // slow time
  const double w = c.omega;
  // u = (x, y, Re I, Im I), I the slow-time integral of exp(-i omega tau) (x + i y)
  auto rhs = [&sys, eps, w](double t, const Vec<4>& u) -> Vec<4> {
    const State v = eval_vector_field(sys, {u[0], u[1]}, TimeScale::Fast);
    const std::complex<double> z = std::polar(eps, -w * eps * t) * std::complex<double>(u[0], u[1]);
    return {v.x, v.y, z.real(), z.imag()};
  };
  IntegratorConfig cf = cfg;
  cf.max_steps = std::min(cfg.max_steps, opt.steps_for(eps) * 10);
  Vec<4> u{s.x, s.y, 0.0, 0.0};
  auto keep = [&](const DenseSegment<4>& seg) {
    u = seg.end();
    return true;
  };
  try {
    const double t1 = integrate_ode<4>(rhs, 0.0, u, window / eps, cf, keep);
    const std::complex<double> first(u[2], u[3]);
    integrate_ode<4>(rhs, t1, u, 2.0 * window / eps, cf, keep);
    // averaging over the second window only drops the transient's
    // O(1/window) contribution
    const std::complex<double> avg = (std::complex<double>(u[2], u[3]) - first) / window;
    const std::complex<double> z = avg / geo.fourier_coefficient();
    if (!(std::abs(z) > 0.0) || !std::isfinite(std::abs(z))) return std::nullopt;
    return z / std::abs(z);
  } catch (const StiffnessError&) {
    return std::nullopt;
  } catch (const DivergenceError&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Phase eigenfunction exp(i theta(s)). Empty when the evaluation budget runs out.
template <SlowFastSystem Sys>
std::optional<std::complex<double>> phase_at(const CycleGeometry<Sys>& geo, State s, const IntegratorConfig& cfg = {},
                                             const SpectralOptions& opt = {}) {
  detail::reject_equilibrium(geo.system(), s);
  if (opt.method == PhaseMethod::FourierAverage) return detail::phase_fourier(geo, s, cfg, opt);
  const auto cap = detail::run_to_cycle(geo, s, cfg, opt, opt.capture_for(geo.system().epsilon()));
  if (!cap) return std::nullopt;
  const double w = geo.cycle().omega;
  // reduce before exponentiating so long flights keep their accuracy
  const double theta = std::remainder(w * cap->match.tau - w * cap->elapsed, 2.0 * std::numbers::pi);
  return std::polar(1.0, theta);
}

template <SlowFastSystem Sys>
std::optional<std::complex<double>> phase_at(const Sys& sys, const LimitCycle& cycle, State s,
                                             const IntegratorConfig& cfg = {}, const SpectralOptions& opt = {}) {
  return phase_at(CycleGeometry<Sys>(sys, cycle), s, cfg, opt);
}

/// Amplitude eigenfunction in log space. Normalized so that
/// phi(anchor + d n) ~ d for the outward unit normal n at the anchor.
template <SlowFastSystem Sys>
std::optional<LogReal> amplitude_at(const CycleGeometry<Sys>& geo, State s, const IntegratorConfig& cfg = {},
                                    const SpectralOptions& opt = {}) {
  detail::reject_equilibrium(geo.system(), s);
  IntegratorConfig tight = cfg;
  tight.rtol = std::min(cfg.rtol, opt.amplitude_rtol);
  tight.atol = std::min(cfg.atol, opt.amplitude_atol);
  const auto cap = detail::run_to_cycle(geo, s, tight, opt, opt.amplitude_capture);
  if (!cap) return std::nullopt;
  LogReal v = geo.linear_amplitude(cap->point, cap->match);
  if (v.sign != 0) v.log_abs -= geo.cycle().floquet_nu * cap->elapsed;
  return v;
}

template <SlowFastSystem Sys>
std::optional<LogReal> amplitude_at(const Sys& sys, const LimitCycle& cycle, State s,
                                    const IntegratorConfig& cfg = {}, const SpectralOptions& opt = {}) {
  return amplitude_at(CycleGeometry<Sys>(sys, cycle), s, cfg, opt);
}

// ---------------------------------------------------------------------------
// Grids

namespace detail {

template <SlowFastSystem Sys>
bool excluded_cell(State s) {
  if constexpr (std::is_same_v<Sys, VanDerPol>) {
    return classify_region(s) == Region::OnW0;
  } else {
    return false;
  }
}

}  // namespace detail

template <SlowFastSystem Sys>
SweepResult<std::complex<double>> phase_grid(const CycleGeometry<Sys>& geo, const GridSpec& grid,
                                             const IntegratorConfig& cfg = {}, const SpectralOptions& opt = {},
                                             unsigned workers = 0) {
  FieldMeta meta{geo.system().epsilon(), {0.0, geo.cycle().omega}, to_string(opt.method), "phase", "none"};
  return sweep<std::complex<double>>(
      grid,
      [&](State s) -> std::optional<std::complex<double>> {
        if (detail::excluded_cell<Sys>(s)) return std::nullopt;
        return phase_at(geo, s, cfg, opt);
      },
      workers, std::move(meta));
}

template <SlowFastSystem Sys>
SweepResult<LogReal> amplitude_grid(const CycleGeometry<Sys>& geo, const GridSpec& grid,
                                    const IntegratorConfig& cfg = {}, const SpectralOptions& opt = {},
                                    unsigned workers = 0) {
  FieldMeta meta{geo.system().epsilon(), {geo.cycle().floquet_nu, 0.0}, "linearized-capture", "amplitude",
                 "none"};
  return sweep<LogReal>(
      grid,
      [&](State s) -> std::optional<LogReal> {
        if (detail::excluded_cell<Sys>(s)) return std::nullopt;
        return amplitude_at(geo, s, cfg, opt);
      },
      workers, std::move(meta));
}

// ---------------------------------------------------------------------------
// Finite differences

enum class Axis { X, Y };
enum class Transform { Angle, LogAbs, Re };

inline const char* to_string(Transform t) {
  switch (t) {
    case Transform::Angle: return "angle";
    case Transform::LogAbs: return "log_abs";
    case Transform::Re: return "re";
  }
  return "?";
}

inline const char* to_string(Axis a) { return a == Axis::X ? "x" : "y"; }

/// Real value of one cell under a transform; NaN for sentinels.
inline double transformed(const std::complex<double>& v, Transform t) {
  if (Sentinel<std::complex<double>>::is(v)) return std::numeric_limits<double>::quiet_NaN();
  switch (t) {
    case Transform::Angle: return std::arg(v);
    case Transform::LogAbs: return std::log(std::abs(v));
    case Transform::Re: return v.real();
  }
  return std::numeric_limits<double>::quiet_NaN();
}

inline double transformed(double v, Transform t) {
  return transformed(std::complex<double>(v, 0.0), t);
}

inline double transformed(const LogReal& v, Transform t) {
  if (Sentinel<LogReal>::is(v)) return std::numeric_limits<double>::quiet_NaN();
  switch (t) {
    case Transform::Angle: return v.sign < 0 ? std::numbers::pi : 0.0;
    case Transform::LogAbs: return v.log_abs;
    case Transform::Re: return v.sign * std::exp(v.log_abs);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

template <class T>
std::vector<double> transformed_values(const Field<T>& f, Transform t) {
  std::vector<double> out(f.values.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = transformed(f.values[k], t);
  return out;
}

namespace detail {

// difference a - b, wrapped to (-pi, pi] for angles
inline double diff(double a, double b, bool angle) {
  double d = a - b;
  if (angle) {
    d = std::remainder(d, 2.0 * std::numbers::pi);
    if (d <= -std::numbers::pi) d += 2.0 * std::numbers::pi;
  }
  return d;
}

inline void require_cells(const GridSpec& g, Axis axis, const char* who) {
  const std::size_t n = axis == Axis::X ? g.nx : g.ny;
  if (n < 3) throw DomainError(std::string(who) + " needs at least 3 cells along " + to_string(axis));
}

// Difference quotient along `axis`: central inside, one-sided at the borders.
// A bad input poisons every quotient that uses it; store(idx, nullopt) marks those.
template <class Bad, class Diff, class Store>
void differentiate(const GridSpec& g, Axis axis, Bad&& is_bad, Diff&& d, Store&& store) {
  using D = decltype(d(std::size_t{}, std::size_t{}));
  const std::size_t n = axis == Axis::X ? g.nx : g.ny;
  const double h = axis == Axis::X ? g.hx() : g.hy();
  for (std::size_t j = 0; j < g.ny; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      const std::size_t pos = axis == Axis::X ? i : j;
      auto at = [&](std::size_t p) { return axis == Axis::X ? g.index(p, j) : g.index(i, p); };
      const std::size_t lo = pos == 0 ? 0 : pos - 1;
      const std::size_t hi = pos + 1 == n ? pos : pos + 1;
      const std::size_t idx = g.index(i, j);
      if (is_bad(idx) || is_bad(at(lo)) || is_bad(at(hi))) {
        store(idx, std::optional<D>{});
        continue;
      }
      store(idx, std::optional<D>{d(at(hi), at(lo)) / (static_cast<double>(hi - lo) * h)});
    }
  }
}

}  // namespace detail

/// Derivative field of a transformed field along one axis.
template <class T>
ScalarField finite_difference_field(const Field<T>& field, Axis axis, Transform t) {
  field.grid.validate();
  detail::require_cells(field.grid, axis, "finite_difference_field");
  const std::vector<double> v = transformed_values(field, t);
  FieldMeta meta = field.meta;
  meta.observable = std::string("d/d") + to_string(axis) + " " + to_string(t) + " of " + field.meta.observable;
  meta.transform = to_string(t);
  ScalarField out(field.grid, std::move(meta));
  const bool angle = t == Transform::Angle;
  const std::size_t stride = axis == Axis::X ? 1 : field.grid.nx;
  detail::differentiate(
      field.grid, axis, [&](std::size_t k) { return !std::isfinite(v[k]); },
      [&](std::size_t a, std::size_t b) {
        // a central stencil spans two cells; wrap each step separately, as when
        // unwrapping the line before differencing
        if (angle && a - b == 2 * stride) {
          return detail::diff(v[a], v[b + stride], true) + detail::diff(v[b + stride], v[b], true);
        }
        return detail::diff(v[a], v[b], angle);
      },
      [&](std::size_t idx, std::optional<double> r) { out.values[idx] = r ? *r : Sentinel<double>::value(); });
  return out;
}

/// |(F/eps) d phi/dx + G d phi/dy - lambda phi| / max(|phi|, eta) per cell.
template <SlowFastSystem Sys>
ScalarField generator_residual(const ComplexField& field, const Sys& sys, std::complex<double> lambda,
                               double eta = 1e-12) {
  const GridSpec& g = field.grid;
  g.validate();
  detail::require_cells(g, Axis::X, "generator_residual");
  detail::require_cells(g, Axis::Y, "generator_residual");
  std::vector<std::complex<double>> dx(g.size()), dy(g.size());
  std::vector<unsigned char> bad(g.size(), 0);
  for (Axis axis : {Axis::X, Axis::Y}) {
    auto& dst = axis == Axis::X ? dx : dy;
    detail::differentiate(
        g, axis, [&](std::size_t k) { return field.is_sentinel(k); },
        [&](std::size_t a, std::size_t b) { return field.values[a] - field.values[b]; },
        [&](std::size_t idx, std::optional<std::complex<double>> r) {
          if (r) dst[idx] = *r;
          else bad[idx] = 1;
        });
  }
  FieldMeta meta = field.meta;
  meta.observable = "generator residual of " + field.meta.observable;
  ScalarField out(g, std::move(meta));
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (bad[k]) continue;
    const State s = g.node(k);
    const State v = eval_vector_field(sys, s, TimeScale::Slow);
    const std::complex<double> phi = field.values[k];
    out.values[k] = std::abs(v.x * dx[k] + v.y * dy[k] - lambda * phi) / std::max(std::abs(phi), eta);
  }
  return out;
}

/// Log-space form for a real eigenfunction phi = sign exp(L):
/// |(F/eps) dL/dx + G dL/dy - lambda| per cell.
template <SlowFastSystem Sys>
ScalarField generator_residual(const LogRealField& field, const Sys& sys, double lambda) {
  const ScalarField lx = finite_difference_field(field, Axis::X, Transform::LogAbs);
  const ScalarField ly = finite_difference_field(field, Axis::Y, Transform::LogAbs);
  FieldMeta meta = field.meta;
  meta.observable = "generator residual of " + field.meta.observable;
  meta.transform = "log_abs";
  ScalarField out(field.grid, std::move(meta));
  for (std::size_t k = 0; k < field.grid.size(); ++k) {
    if (lx.is_sentinel(k) || ly.is_sentinel(k)) continue;
    const State v = eval_vector_field(sys, field.grid.node(k), TimeScale::Slow);
    out.values[k] = std::abs(v.x * lx.values[k] + v.y * ly.values[k] - lambda);
  }
  return out;
}

}  // namespace koopman_sp
