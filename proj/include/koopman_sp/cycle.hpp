#pragma once

// Limit cycle location by a Poincare return map on Sigma = {y = 0, x > 0},
// period / frequency, and the Floquet exponent by two independent routes.

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>
#include <vector>

#include "json.hpp"
#include "koopman_sp/constants.hpp"
#include "koopman_sp/model.hpp"
#include "koopman_sp/ode.hpp"

namespace koopman_sp {

struct CycleOptions {
  State burn_in_start{2.0, 0.0};
  double burn_in = 5.0;  ///< slow time
  std::size_t samples = 2048;
  std::size_t quadrature_nodes = 20000;
  double return_tolerance = 1e-12;
  int max_secant_iterations = 60;
  double section_t_max = 200.0;  ///< slow time allowed for one return
  Section section = Section::phase_section();
};

struct CycleResiduals {
  double return_map = 0.0;   ///< |P(x*) - x*| at the anchor
  double closure = 0.0;      ///< |S_T(anchor) - anchor|
  double quadrature = 0.0;   ///< |nu(M nodes) - nu(M/2 nodes)|
  double odd_symmetry = 0.0; ///< max |c(tau) + c(tau + T/2)| over samples (van der Pol only)
};

/// Stable limit cycle with its phase parameterization. The phase of a cycle point
/// is omega times the slow time elapsed since the anchor.
struct LimitCycle {
  double epsilon = 0.0;
  double period = 0.0;      ///< T, slow time
  double omega = 0.0;       ///< 2 pi / T
  double floquet_nu = 0.0;  ///< slow time^-1, divergence route
  State anchor;             ///< theta = 0 on the section
  std::vector<State> samples;  ///< samples[k] at slow time k T / N
  DenseTrajectory orbit;       ///< one period from the anchor, slow-time accessor
  CycleResiduals residuals;

  State at(double tau) const {
    double u = std::fmod(tau, period);
    if (u < 0) u += period;
    return orbit.at(u);
  }
};

namespace detail {

template <SlowFastSystem Sys>
double return_map(const Sys& sys, double x, const CycleOptions& opt, const IntegratorConfig& cfg,
                  double* t_return = nullptr) {
  const Section& sec = opt.section;
  // sections are parameterized by x, so the line must not be vertical
  State s0{x, (sec.offset - sec.normal.x * x) / sec.normal.y};
  const SectionHit hit = integrate_until_section(sys, s0, TimeScale::Slow, sec, cfg, opt.section_t_max);
  if (t_return) *t_return = hit.time;
  return hit.state.x;
}

template <SlowFastSystem Sys>
double divergence_mean(const Sys& sys, const LimitCycle& c, std::size_t nodes) {
  // periodic trapezoid rule = plain mean over equispaced nodes
  double acc = 0.0;
  for (std::size_t j = 0; j < nodes; ++j) {
    const double tau = c.period * static_cast<double>(j) / static_cast<double>(nodes);
    acc += slow_divergence(sys, c.orbit.at(tau));
  }
  return acc / static_cast<double>(nodes);
}

}  // namespace detail

/// nu = (1/T) closed integral of (1/eps) dF/dx + dG/dy along the cycle (Liouville).
/// Never forms the multiplier, so it works where exp(nu T) underflows.
template <SlowFastSystem Sys>
double floquet_exponent_divergence(const Sys& sys, const LimitCycle& cycle, std::size_t nodes = 20000) {
  const double nu = detail::divergence_mean(sys, cycle, nodes);
  if (!std::isfinite(nu)) throw Error("Floquet quadrature is not finite");
  return nu;
}

template <SlowFastSystem Sys>
LimitCycle find_limit_cycle(const Sys& sys, const IntegratorConfig& cfg = {}, const CycleOptions& opt = {}) {
  if (opt.section.normal.y == 0.0) throw DomainError("cycle section must not be a vertical line");
  LimitCycle c;
  c.epsilon = sys.epsilon();
  try {
    const State warm = flow(sys, opt.burn_in_start, TimeScale::Slow, opt.burn_in, cfg);
    const SectionHit first =
        integrate_until_section(sys, warm, TimeScale::Slow, opt.section, cfg, opt.section_t_max);

    // Secant iteration on h(x) = P(x) - x. The return map is strongly
    // contracting, so this behaves like a damped fixed-point iteration.
    double x0 = first.state.x;
    double t0 = 0.0;
    double p0 = detail::return_map(sys, x0, opt, cfg, &t0);
    double h0 = p0 - x0;
    double x1 = p0;
    double t1 = 0.0;
    double h1 = detail::return_map(sys, x1, opt, cfg, &t1) - x1;
    int it = 0;
    while (std::abs(h1) >= opt.return_tolerance) {
      if (++it > opt.max_secant_iterations) {
        throw CycleNotFoundError("return map did not converge, residual " + std::to_string(h1));
      }
      const double denom = h1 - h0;
      double x2 = (denom != 0.0 && std::isfinite(denom)) ? x1 - h1 * (x1 - x0) / denom : x1 + h1;
      if (!std::isfinite(x2) || std::abs(x2 - x1) > 10.0 * std::abs(h1) + 1e-300) x2 = x1 + h1;
      x0 = x1;
      h0 = h1;
      x1 = x2;
      h1 = detail::return_map(sys, x1, opt, cfg, &t1) - x1;
    }
    c.anchor = {x1, (opt.section.offset - opt.section.normal.x * x1) / opt.section.normal.y};
    c.period = t1;
    c.residuals.return_map = std::abs(h1);
  } catch (const NoEventError& e) {
    throw CycleNotFoundError(std::string("no section crossing: ") + e.what());
  }

  c.omega = 2.0 * std::numbers::pi / c.period;
  c.orbit = integrate_dense(sys, c.anchor, TimeScale::Slow, c.period, cfg);
  c.residuals.closure = norm(c.orbit.at(c.period) - c.anchor);

  const std::size_t n = opt.samples;
  c.samples.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    c.samples[k] = c.orbit.at(c.period * static_cast<double>(k) / static_cast<double>(n));
  }
  if (n % 2 == 0) {
    double worst = 0.0;
    for (std::size_t k = 0; k < n / 2; ++k) worst = std::max(worst, norm(c.samples[k] + c.samples[k + n / 2]));
    c.residuals.odd_symmetry = worst;
  }

  c.floquet_nu = floquet_exponent_divergence(sys, c, opt.quadrature_nodes);
  c.residuals.quadrature = std::abs(c.floquet_nu - floquet_exponent_divergence(sys, c, opt.quadrature_nodes / 2));
  if (!(c.floquet_nu < 0.0)) throw CycleNotFoundError("cycle is not attracting (nu >= 0)");
  return c;
}

/// Largest |nu| T for which the nontrivial multiplier exp(nu T) is still
/// resolvable next to the trivial multiplier 1 in double precision.
inline constexpr double kMonodromyMaxDecay = 25.0;

struct MonodromyResult {
  double nu = 0.0;
  double trivial_multiplier = 0.0;
  double nontrivial_multiplier = 0.0;
};

/// Floquet exponent from the eigenvalues of the monodromy matrix, integrating the
/// 2x2 variational equation in fast time over one period.
template <SlowFastSystem Sys>
MonodromyResult floquet_monodromy(const Sys& sys, const LimitCycle& cycle, const IntegratorConfig& cfg = {}) {
  if (!(std::abs(cycle.floquet_nu) * cycle.period <= kMonodromyMaxDecay)) {
    throw RangeError("monodromy multiplier below double-precision resolution (|nu| T = " +
                     std::to_string(std::abs(cycle.floquet_nu) * cycle.period) + ")");
  }
  const double eps = sys.epsilon();
  IntegratorConfig tight = cfg;
  tight.rtol = std::min(cfg.rtol, 1e-11);
  tight.atol = std::min(cfg.atol, 1e-13);
  auto rhs = [&sys, eps](double, const Vec<6>& u) -> Vec<6> {
    const State v = eval_vector_field(sys, {u[0], u[1]}, TimeScale::Fast);
    const Jacobian j = sys.jacobian(u[0], u[1]);
    // rows of J_fast = [[Fx, Fy], [eps Gx, eps Gy]] times Phi = [[u2, u3], [u4, u5]]
    return {v.x,
            v.y,
            j.Fx * u[2] + j.Fy * u[4],
            j.Fx * u[3] + j.Fy * u[5],
            eps * (j.Gx * u[2] + j.Gy * u[4]),
            eps * (j.Gx * u[3] + j.Gy * u[5])};
  };
  Vec<6> u{cycle.anchor.x, cycle.anchor.y, 1.0, 0.0, 0.0, 1.0};
  integrate_ode<6>(rhs, 0.0, u, cycle.period / eps, tight, [&](const DenseSegment<6>& seg) {
    u = seg.end();
    return true;
  });
  const double tr = u[2] + u[5];
  const double det = u[2] * u[5] - u[3] * u[4];
  const double disc = tr * tr / 4.0 - det;
  if (disc < 0.0) throw RangeError("monodromy matrix has complex multipliers");
  const double sq = std::sqrt(disc);
  const double m1 = tr / 2.0 + sq;
  // the small root by Vieta to avoid cancellation
  const double m2 = det / m1;
  const bool first_trivial = std::abs(m1 - 1.0) <= std::abs(m2 - 1.0);
  MonodromyResult r;
  r.trivial_multiplier = first_trivial ? m1 : m2;
  r.nontrivial_multiplier = first_trivial ? m2 : m1;
  if (!(r.nontrivial_multiplier > 0.0)) throw RangeError("nontrivial multiplier is not positive");
  r.nu = std::log(r.nontrivial_multiplier) / cycle.period;
  return r;
}

template <SlowFastSystem Sys>
double floquet_exponent_monodromy(const Sys& sys, const LimitCycle& cycle, const IntegratorConfig& cfg = {}) {
  return floquet_monodromy(sys, cycle, cfg).nu;
}

/// Zeroth-order estimates: T0 = 3 - 2 ln 2, omega0 = 2 pi / T0, nu ~ nu0 / eps.
struct AsymptoticEstimates {
  double T0 = 0.0;
  double omega0 = 0.0;
  double nu_estimate = 0.0;
};

inline AsymptoticEstimates asymptotic_estimates(double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("asymptotic estimates need epsilon > 0");
  return {SingularConstants::T0(), SingularConstants::omega0(), SingularConstants::nu0() / epsilon};
}

// ---------------------------------------------------------------------------
// Report

struct CycleReport {
  double epsilon = 0.0;
  double period = 0.0;
  double omega = 0.0;
  double nu = 0.0;
  std::optional<double> nu_monodromy;
  CycleResiduals residuals;
  std::optional<double> trivial_multiplier;
  double wall_time = 0.0;  ///< seconds; not serialized so reports are reproducible
};

/// Cycle plus both Floquet routes; the monodromy route is skipped when refused.
template <SlowFastSystem Sys>
CycleReport cycle_report(const Sys& sys, const IntegratorConfig& cfg = {}, const CycleOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  const LimitCycle c = find_limit_cycle(sys, cfg, opt);
  CycleReport r{c.epsilon, c.period, c.omega, c.floquet_nu, std::nullopt, c.residuals, std::nullopt, 0.0};
  try {
    const MonodromyResult m = floquet_monodromy(sys, c, cfg);
    r.nu_monodromy = m.nu;
    r.trivial_multiplier = m.trivial_multiplier;
  } catch (const RangeError&) {
  }
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline nlohmann::ordered_json to_json(const CycleReport& r) {
  nlohmann::ordered_json j;
  j["epsilon"] = r.epsilon;
  j["period"] = r.period;
  j["omega"] = r.omega;
  j["nu"] = r.nu;
  j["nu_monodromy"] = r.nu_monodromy ? nlohmann::ordered_json(*r.nu_monodromy) : nlohmann::ordered_json(nullptr);
  nlohmann::ordered_json res;
  res["return_map"] = r.residuals.return_map;
  res["closure"] = r.residuals.closure;
  res["quadrature"] = r.residuals.quadrature;
  res["odd_symmetry"] = r.residuals.odd_symmetry;
  res["trivial_multiplier"] =
      r.trivial_multiplier ? nlohmann::ordered_json(*r.trivial_multiplier) : nlohmann::ordered_json(nullptr);
  j["residuals"] = res;
  return j;
}

}  // namespace koopman_sp
