#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "koopman_sp/cycle.hpp"

using namespace koopman_sp;

namespace {

// clockwise circle of radius 1: period 2 pi, nu = -2 exactly
GenericSystem circle() {
  return GenericSystem([](double x, double y) { return x + y - x * (x * x + y * y); },
                       [](double x, double y) { return -x + y - y * (x * x + y * y); }, 1.0,
                       [](double x, double y) {
                         return Jacobian{1.0 - 3 * x * x - y * y, 1.0 - 2 * x * y, -1.0 - 2 * x * y,
                                         1.0 - x * x - 3 * y * y};
                       });
}

const LimitCycle& vdp1() {
  static const LimitCycle c = find_limit_cycle(VanDerPol(1.0));
  return c;
}

}  // namespace

TEST(Cycle, ClosedFormCircle) {
  const GenericSystem sys = circle();
  const LimitCycle c = find_limit_cycle(sys);
  EXPECT_NEAR(c.period, 2.0 * std::numbers::pi, 1e-8);
  EXPECT_NEAR(c.floquet_nu, -2.0, 1e-8);
  EXPECT_NEAR(c.anchor.x, 1.0, 1e-9);
  EXPECT_NEAR(c.anchor.y, 0.0, 1e-12);
  for (std::size_t k = 0; k < c.samples.size(); k += 97) EXPECT_NEAR(norm(c.samples[k]), 1.0, 1e-8);
  EXPECT_NEAR(floquet_exponent_monodromy(sys, c), -2.0, 1e-6);
}

TEST(Cycle, VanDerPolUnitEpsilon) {
  const LimitCycle& c = vdp1();
  EXPECT_NEAR(c.period, 6.6633, 1e-3);
  EXPECT_NEAR(c.omega, 2.0 * std::numbers::pi / c.period, 1e-15);
  EXPECT_NEAR(c.floquet_nu, -1.0594, 1e-3);
  EXPECT_NEAR(c.anchor.y, 0.0, 1e-12);
  EXPECT_GT(c.anchor.x, 0.0);
  EXPECT_LT(c.residuals.closure, 1e-6);
  EXPECT_LT(c.residuals.return_map, 1e-11);
  EXPECT_LT(c.residuals.quadrature, 1e-8);
}

TEST(Cycle, ReturnTimeOracle) {
  const VanDerPol sys(1.0);
  const LimitCycle& c = vdp1();
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  const SectionHit hit = integrate_until_section(sys, c.anchor, TimeScale::Slow, Section::phase_section(), cfg, 20.0);
  EXPECT_NEAR(hit.time, c.period, 1e-7);
  EXPECT_NEAR(hit.state.x, c.anchor.x, 1e-7);
}

TEST(Cycle, PeriodicAccessorAndOddSymmetry) {
  const LimitCycle& c = vdp1();
  for (double tau : {0.3, 2.1, 5.0}) {
    EXPECT_LT(norm(c.at(tau) - c.at(tau + c.period)), 1e-12);
    EXPECT_LT(norm(c.at(tau) + c.at(tau + 0.5 * c.period)), 1e-6);
  }
  EXPECT_LT(c.residuals.odd_symmetry, 1e-6);
}

TEST(Cycle, DivergenceNuMatchesTrapezoidOverSamples) {
  const VanDerPol sys(1.0);
  const LimitCycle& c = vdp1();
  double acc = 0.0;
  for (const State& s : c.samples) acc += slow_divergence(sys, s);
  EXPECT_NEAR(acc / static_cast<double>(c.samples.size()), c.floquet_nu, 1e-6);
}

TEST(Cycle, MonodromyAgreesAtUnitEpsilon) {
  const VanDerPol sys(1.0);
  const MonodromyResult m = floquet_monodromy(sys, vdp1());
  EXPECT_NEAR(m.nu, vdp1().floquet_nu, 1e-4);
  EXPECT_NEAR(m.trivial_multiplier, 1.0, 1e-5);
}

TEST(Cycle, MonodromyRefusedWhenUnresolvable) {
  const VanDerPol sys(0.01);
  const LimitCycle c = find_limit_cycle(sys);
  EXPECT_THROW(floquet_exponent_monodromy(sys, c), RangeError);
  const CycleReport r = cycle_report(sys);
  EXPECT_FALSE(r.nu_monodromy.has_value());
  EXPECT_TRUE(to_json(r)["nu_monodromy"].is_null());
}

TEST(Cycle, TableTwoSmallEpsilon) {
  const LimitCycle a = find_limit_cycle(VanDerPol(0.1));
  EXPECT_NEAR(a.period, 2.87, 0.01);
  EXPECT_NEAR(a.omega, 2.19, 0.01);
  EXPECT_NEAR(a.floquet_nu, -13.3, 0.2);
  const LimitCycle b = find_limit_cycle(VanDerPol(0.01));
  EXPECT_NEAR(b.period, 1.91, 0.01);
  EXPECT_NEAR(b.omega, 3.29, 0.01);
  EXPECT_NEAR(b.floquet_nu, -163.0, 3.0);
}

TEST(Cycle, NoCycleIsReported) {
  const GenericSystem sink([](double x, double) { return -x; }, [](double, double y) { return -y; }, 1.0);
  EXPECT_THROW(find_limit_cycle(sink), CycleNotFoundError);
}

TEST(Cycle, ReportJsonFields) {
  const auto j = to_json(cycle_report(VanDerPol(1.0)));
  EXPECT_NEAR(j["period"].get<double>(), 6.6633, 1e-3);
  EXPECT_TRUE(j.contains("residuals"));
  EXPECT_FALSE(j.contains("wall_time"));
}
