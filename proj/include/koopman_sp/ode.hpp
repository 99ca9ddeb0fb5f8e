#pragma once

// Explicit Runge-Kutta integration of the perturbed flows.
//
// All planar integrations step the fast-time form x' = F, y' = eps G; a slow-time
// horizon tau is converted to t = tau / eps and output times are rescaled back.
// For the systems handled here this keeps the problem nonstiff in t, so no
// implicit solver is needed even at eps = 0.01.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "koopman_sp/model.hpp"
#include "koopman_sp/types.hpp"

namespace koopman_sp {

template <std::size_t N>
using Vec = std::array<double, N>;

enum class Method {
  DormandPrince45,  ///< embedded 5(4) pair, PI step control, 4th order dense output
  RungeKutta4,      ///< classical fixed step; test oracle
};

struct IntegratorConfig {
  double rtol = 1e-9;
  double atol = 1e-11;
  double max_step = std::numeric_limits<double>::infinity();
  long max_steps = 10'000'000;
  Method method = Method::DormandPrince45;
  /// Step of the fixed-step method, in integration (fast) time.
  double fixed_step = 1e-3;
};

/// One accepted step with its continuous extension
///   y(t0 + s h) = r0 + s (r1 + (1-s) (r2 + s (r3 + (1-s) r4))),  s in [0, 1].
template <std::size_t N>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<Vec<N>, 5> r{};

  double t1() const { return t0 + h; }
  Vec<N> start() const { return r[0]; }

  Vec<N> end() const {
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) y[i] = r[0][i] + r[1][i];
    return y;
  }

  Vec<N> operator()(double t) const {
    const double s = h == 0.0 ? 0.0 : (t - t0) / h;
    const double s1 = 1.0 - s;
    Vec<N> y;
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = r[0][i] + s * (r[1][i] + s1 * (r[2][i] + s * (r[3][i] + s1 * r[4][i])));
    }
    return y;
  }
};

/// Piecewise continuous extension over consecutive accepted steps.
template <std::size_t N>
class DenseSolution {
 public:
  void push_back(const DenseSegment<N>& seg) { segs_.push_back(seg); }
  bool empty() const { return segs_.empty(); }
  std::size_t size() const { return segs_.size(); }
  const std::vector<DenseSegment<N>>& segments() const { return segs_; }
  double t_begin() const { return segs_.front().t0; }
  double t_end() const { return segs_.back().t1(); }

  /// Index of the segment containing t (clamped to the covered interval).
  std::size_t locate(double t) const {
    auto it = std::upper_bound(segs_.begin(), segs_.end(), t,
                               [](double v, const DenseSegment<N>& s) { return v < s.t0; });
    if (it == segs_.begin()) return 0;
    return static_cast<std::size_t>(std::distance(segs_.begin(), it) - 1);
  }

  Vec<N> operator()(double t) const { return segs_[locate(t)](t); }

 private:
  std::vector<DenseSegment<N>> segs_;
};

namespace detail {

template <std::size_t N>
bool all_finite(const Vec<N>& y) {
  return std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); });
}

template <std::size_t N>
State head(const Vec<N>& y) {
  if constexpr (N >= 2) return {y[0], y[1]};
  else return {y[0], 0.0};
}

// Dormand-Prince 5(4) tableau and Shampine's dense output weights.
struct DP45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N, class Rhs>
double initial_step(Rhs& rhs, double t, const Vec<N>& y, const Vec<N>& f0, double dir,
                    const IntegratorConfig& cfg) {
  double dnf = 0, dny = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::abs(y[i]);
    dnf += (f0[i] / sk) * (f0[i] / sk);
    dny += (y[i] / sk) * (y[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, cfg.max_step);
  Vec<N> y1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h * f0[i];
  const Vec<N> f1 = rhs(t + dir * h, y1);
  double der2 = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sk = cfg.atol + cfg.rtol * std::abs(y[i]);
    der2 += ((f1[i] - f0[i]) / sk) * ((f1[i] - f0[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;
  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = der12 <= 1e-15 ? std::max(1e-6, std::abs(h) * 1e-3) : std::pow(0.01 / der12, 0.2);
  return std::min({100 * std::abs(h), h1, cfg.max_step});
}

}  // namespace detail

/// Integrate y' = rhs(t, y) from t0 to t_end (t_end >= t0), reporting each accepted
/// step to `observer`, which returns false to stop early. Returns the final time.
template <std::size_t N, class Rhs, class Observer>
double integrate_ode(Rhs&& rhs, double t0, Vec<N> y, double t_end, const IntegratorConfig& cfg,
                     Observer&& observer) {
  if (!(cfg.rtol > 0) || !(cfg.atol > 0) || cfg.max_steps <= 0) {
    throw DomainError("integrator tolerances and step budget must be positive");
  }
  if (!(t_end >= t0)) throw DomainError("integration horizon must be non-negative");
  if (!detail::all_finite(y)) throw DivergenceError(t0, detail::head(y));
  if (t_end == t0) return t0;

  double t = t0;
  long steps = 0;

  if (cfg.method == Method::RungeKutta4) {
    if (!(cfg.fixed_step > 0)) throw DomainError("fixed step must be positive");
    Vec<N> k1 = rhs(t, y);
    while (t < t_end) {
      if (++steps > cfg.max_steps) throw StiffnessError("step budget exhausted", t, detail::head(y));
      const double h = std::min(cfg.fixed_step, t_end - t);
      Vec<N> tmp, k2, k3, k4, y1;
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      k2 = rhs(t + 0.5 * h, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      k3 = rhs(t + 0.5 * h, tmp);
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
      k4 = rhs(t + h, tmp);
      for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!detail::all_finite(y1)) throw DivergenceError(t, detail::head(y));
      const double tn = (t_end - (t + h) <= 1e-14 * std::max(1.0, std::abs(t_end))) ? t_end : t + h;
      const Vec<N> kn = rhs(tn, y1);
      // cubic Hermite extension
      DenseSegment<N> seg{t, tn - t, {}};
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = seg.h * k1[i] - ydiff;
        seg.r[0][i] = y[i];
        seg.r[1][i] = ydiff;
        seg.r[2][i] = bspl;
        seg.r[3][i] = ydiff - seg.h * kn[i] - bspl;
        seg.r[4][i] = 0.0;
      }
      t = tn;
      y = y1;
      k1 = kn;
      if (!observer(static_cast<const DenseSegment<N>&>(seg))) return t;
    }
    return t;
  }

  using T = detail::DP45;
  constexpr double safe = 0.9, fac1 = 0.2, fac2 = 10.0, beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  double facold = 1e-4;

  Vec<N> k1 = rhs(t, y), k2, k3, k4, k5, k6, k7, ytmp, y1;
  double h = detail::initial_step<N>(rhs, t, y, k1, 1.0, cfg);
  bool last_rejected = false;

  while (true) {
    if (t >= t_end) return t;
    if (++steps > cfg.max_steps) throw StiffnessError("step budget exhausted", t, detail::head(y));
    if (h < 1e-14 * std::max(1.0, std::abs(t))) {
      throw StiffnessError("step size underflow", t, detail::head(y));
    }
    bool last = false;
    if (t + 1.01 * h >= t_end) {
      h = t_end - t;
      last = true;
    }

    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * T::a21 * k1[i];
    k2 = rhs(t + T::c2 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i) ytmp[i] = y[i] + h * (T::a31 * k1[i] + T::a32 * k2[i]);
    k3 = rhs(t + T::c3 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
    k4 = rhs(t + T::c4 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
    k5 = rhs(t + T::c5 * h, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      ytmp[i] = y[i] + h * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] +
                            T::a65 * k5[i]);
    const double tph = last ? t_end : t + h;
    k6 = rhs(tph, ytmp);
    for (std::size_t i = 0; i < N; ++i)
      y1[i] = y[i] + h * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] + T::a75 * k5[i] +
                          T::a76 * k6[i]);
    k7 = rhs(tph, y1);

    double err = 0.0;
    bool finite = detail::all_finite(y1);
    if (finite) {
      for (std::size_t i = 0; i < N; ++i) {
        const double sk = cfg.atol + cfg.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        const double e = h * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] +
                              T::e6 * k6[i] + T::e7 * k7[i]);
        err += (e / sk) * (e / sk);
      }
      err = std::sqrt(err / static_cast<double>(N));
      finite = std::isfinite(err);
    }
    if (!finite) {
      // shrink hard; a genuinely divergent solution ends in step underflow
      if (h < 1e-12 * std::max(1.0, std::abs(t))) throw DivergenceError(t, detail::head(y));
      h *= 0.1;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, expo1);
    double fac = fac11 / std::pow(facold, beta);
    fac = std::max(1.0 / fac2, std::min(1.0 / fac1, fac / safe));
    double hnew = h / fac;

    if (err <= 1.0) {
      facold = std::max(err, 1e-4);
      DenseSegment<N> seg{t, h, {}};
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y1[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        seg.r[0][i] = y[i];
        seg.r[1][i] = ydiff;
        seg.r[2][i] = bspl;
        seg.r[3][i] = ydiff - h * k7[i] - bspl;
        seg.r[4][i] = h * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] +
                           T::d6 * k6[i] + T::d7 * k7[i]);
      }
      k1 = k7;
      y = y1;
      t = tph;
      if (!observer(static_cast<const DenseSegment<N>&>(seg))) return t;
      if (last) return t;
      hnew = std::min(hnew, cfg.max_step);
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
    } else {
      hnew = h / std::min(1.0 / fac1, fac11 / safe);
      last_rejected = true;
    }
    h = hnew;
  }
}

// ---------------------------------------------------------------------------
// Planar flows of a slow-fast system.

/// Sampled solution path; times are in the units of `scale`.
struct Trajectory {
  TimeScale scale = TimeScale::Slow;
  std::vector<double> times;
  std::vector<State> states;

  std::size_t size() const { return times.size(); }
  State back() const { return states.back(); }
};

/// Solution with continuous extension; `at(u)` takes time in the units of `scale`.
struct DenseTrajectory {
  TimeScale scale = TimeScale::Slow;
  double to_fast = 1.0;  ///< multiply a user time by this to get fast time
  DenseSolution<2> solution;

  State at(double u) const {
    const Vec<2> v = solution(u * to_fast);
    return {v[0], v[1]};
  }
  double duration() const { return solution.empty() ? 0.0 : solution.t_end() / to_fast; }
};

namespace detail {

template <SlowFastSystem Sys>
auto fast_rhs(const Sys& sys) {
  return [&sys](double, const Vec<2>& y) -> Vec<2> {
    const State v = eval_vector_field(sys, State{y[0], y[1]}, TimeScale::Fast);
    return {v.x, v.y};
  };
}

template <SlowFastSystem Sys>
double to_fast_factor(const Sys& sys, TimeScale scale) {
  return scale == TimeScale::Slow ? 1.0 / sys.epsilon() : 1.0;
}

}  // namespace detail

template <SlowFastSystem Sys>
Trajectory integrate(const Sys& sys, State s0, TimeScale scale, double duration,
                     const IntegratorConfig& cfg = {}) {
  if (!(duration >= 0)) throw DomainError("integrate: duration must be non-negative");
  if (!s0.finite()) throw DomainError("integrate: initial state must be finite");
  const double k = detail::to_fast_factor(sys, scale);
  Trajectory traj{scale, {0.0}, {s0}};
  integrate_ode<2>(detail::fast_rhs(sys), 0.0, Vec<2>{s0.x, s0.y}, duration * k, cfg,
                   [&](const DenseSegment<2>& seg) {
                     const Vec<2> e = seg.end();
                     traj.times.push_back(seg.t1() == duration * k ? duration : seg.t1() / k);
                     traj.states.push_back({e[0], e[1]});
                     return true;
                   });
  return traj;
}

template <SlowFastSystem Sys>
DenseTrajectory integrate_dense(const Sys& sys, State s0, TimeScale scale, double duration,
                                const IntegratorConfig& cfg = {}) {
  if (!(duration >= 0)) throw DomainError("integrate: duration must be non-negative");
  const double k = detail::to_fast_factor(sys, scale);
  DenseTrajectory out{scale, k, {}};
  integrate_ode<2>(detail::fast_rhs(sys), 0.0, Vec<2>{s0.x, s0.y}, duration * k, cfg,
                   [&](const DenseSegment<2>& seg) {
                     out.solution.push_back(seg);
                     return true;
                   });
  return out;
}

/// Time-`duration` map S_duration of the chosen time scale.
template <SlowFastSystem Sys>
State flow(const Sys& sys, State s0, TimeScale scale, double duration, const IntegratorConfig& cfg = {}) {
  if (!(duration >= 0)) throw DomainError("flow: duration must be non-negative");
  if (!s0.finite()) throw DomainError("flow: initial state must be finite");
  const double k = detail::to_fast_factor(sys, scale);
  State last = s0;
  integrate_ode<2>(detail::fast_rhs(sys), 0.0, Vec<2>{s0.x, s0.y}, duration * k, cfg,
                   [&](const DenseSegment<2>& seg) {
                     const Vec<2> e = seg.end();
                     last = {e[0], e[1]};
                     return true;
                   });
  return last;
}

// ---------------------------------------------------------------------------
// Section events.

enum class Crossing { Increasing, Decreasing, Both };

/// Line event g(s) = normal . s - offset = 0 with a crossing direction, optionally
/// restricted to the half-plane side . s > side_offset.
struct Section {
  State normal{0.0, 1.0};
  double offset = 0.0;
  Crossing direction = Crossing::Decreasing;
  bool restricted = true;
  State side{1.0, 0.0};
  double side_offset = 0.0;

  double g(State s) const { return dot(normal, s) - offset; }
  bool admissible(State s) const { return !restricted || dot(side, s) > side_offset; }

  /// Sigma = {y = 0, x > 0}; the van der Pol flow crosses it with y decreasing.
  static Section phase_section() { return {}; }
};

struct SectionHit {
  State state;
  double time = 0.0;  ///< in the units of the requested scale
};

/// Refractory interval after the start, in fast time, during which crossings are ignored.
inline constexpr double kSectionRefractory = 1e-3;

namespace detail {

inline bool brackets(double ga, double gb, Crossing dir) {
  switch (dir) {
    case Crossing::Increasing: return ga < 0.0 && gb >= 0.0;
    case Crossing::Decreasing: return ga > 0.0 && gb <= 0.0;
    case Crossing::Both: return (ga < 0.0 && gb >= 0.0) || (ga > 0.0 && gb <= 0.0);
  }
  return false;
}

/// Bisection on the continuous extension until |g| < 1e-12 (at most 80 halvings).
template <std::size_t N>
double refine_crossing(const DenseSegment<N>& seg, const Section& sec) {
  double a = seg.t0, b = seg.t1();
  double ga = sec.g(head(seg(a)));
  double tm = b;
  for (int it = 0; it < 80; ++it) {
    tm = 0.5 * (a + b);
    const double gm = sec.g(head(seg(tm)));
    if (std::abs(gm) < 1e-12) break;
    if ((ga < 0) == (gm < 0)) {
      a = tm;
      ga = gm;
    } else {
      b = tm;
    }
  }
  return tm;
}

}  // namespace detail

/// First directional crossing of `section` after the refractory interval.
template <SlowFastSystem Sys>
SectionHit integrate_until_section(const Sys& sys, State s0, TimeScale scale, const Section& section,
                                   const IntegratorConfig& cfg, double t_max) {
  if (!(t_max > 0)) throw DomainError("integrate_until_section: t_max must be positive");
  const double k = detail::to_fast_factor(sys, scale);
  bool found = false;
  SectionHit hit;
  integrate_ode<2>(detail::fast_rhs(sys), 0.0, Vec<2>{s0.x, s0.y}, t_max * k, cfg,
                   [&](const DenseSegment<2>& seg) {
                     if (seg.t1() <= kSectionRefractory) return true;
                     const double ga = section.g(detail::head(seg.start()));
                     const double gb = section.g(detail::head(seg.end()));
                     if (!detail::brackets(ga, gb, section.direction)) return true;
                     const double tc = detail::refine_crossing(seg, section);
                     const Vec<2> v = seg(tc);
                     const State sc{v[0], v[1]};
                     if (tc <= kSectionRefractory || !section.admissible(sc)) return true;
                     hit = {sc, tc / k};
                     found = true;
                     return false;
                   });
  if (!found) throw NoEventError("no section crossing before t_max");
  return hit;
}

}  // namespace koopman_sp
