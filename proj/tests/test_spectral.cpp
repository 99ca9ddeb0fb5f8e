#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "koopman_sp/spectral.hpp"

using namespace koopman_sp;

namespace {

// clockwise unit circle: r' = r (1 - r^2), angle' = -1. Closed forms:
//   phase      exp(-i atan2(y, x))
//   amplitude  (r^2 - 1) / (2 r^2), nu = -2
GenericSystem circle() {
  return GenericSystem([](double x, double y) { return x + y - x * (x * x + y * y); },
                       [](double x, double y) { return -x + y - y * (x * x + y * y); }, 1.0,
                       [](double x, double y) {
                         return Jacobian{1.0 - 3 * x * x - y * y, 1.0 - 2 * x * y, -1.0 - 2 * x * y,
                                         1.0 - x * x - 3 * y * y};
                       });
}

const CycleGeometry<GenericSystem>& circle_geo() {
  static const CycleGeometry<GenericSystem> g(circle(), find_limit_cycle(circle()));
  return g;
}

const CycleGeometry<VanDerPol>& vdp_geo() {
  static const CycleGeometry<VanDerPol> g(VanDerPol(1.0), find_limit_cycle(VanDerPol(1.0)));
  return g;
}

double ang(std::complex<double> a, std::complex<double> b) { return std::abs(std::arg(a / b)); }

}  // namespace

TEST(Phase, CircleClosedForm) {
  for (State s : {State{0.3, 0.2}, State{-1.5, 0.7}, State{0.1, -2.0}, State{1.0, 0.0}}) {
    const auto p = phase_at(circle_geo(), s);
    ASSERT_TRUE(p.has_value());
    EXPECT_NEAR(std::abs(*p), 1.0, 1e-14);
    EXPECT_LT(ang(*p, std::polar(1.0, -std::atan2(s.y, s.x))), 1e-6) << to_string(s);
  }
}

TEST(Amplitude, CircleClosedForm) {
  for (State s : {State{0.6, 0.2}, State{-1.5, 0.7}, State{0.1, -1.3}}) {
    const auto a = amplitude_at(circle_geo(), s);
    ASSERT_TRUE(a.has_value());
    const double r2 = s.x * s.x + s.y * s.y;
    const double exact = (r2 - 1.0) / (2.0 * r2);
    EXPECT_EQ(a->sign, exact > 0 ? 1 : -1);
    EXPECT_NEAR(a->log_abs, std::log(std::abs(exact)), 1e-4) << to_string(s);
  }
}

TEST(Phase, OnCycleIsElapsedPhase) {
  const auto& geo = vdp_geo();
  const LimitCycle& c = geo.cycle();
  EXPECT_LT(ang(*phase_at(geo, c.anchor), 1.0), 1e-9);
  for (double tau : {0.7, 3.1, 5.9}) {
    EXPECT_LT(ang(*phase_at(geo, c.at(tau)), std::polar(1.0, c.omega * tau)), 1e-6);
  }
}

TEST(Phase, EigenRelation) {
  const auto& geo = vdp_geo();
  const VanDerPol& sys = geo.system();
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  for (State s : {State{0.5, 0.5}, State{-3.0, 1.5}, State{2.5, -1.0}}) {
    const auto p0 = phase_at(geo, s);
    for (double tau : {0.05, 0.2}) {
      const auto p1 = phase_at(geo, flow(sys, s, TimeScale::Slow, tau, cfg));
      ASSERT_TRUE(p0 && p1);
      EXPECT_LT(std::abs(*p1 - std::polar(1.0, geo.cycle().omega * tau) * *p0), 1e-6);
    }
  }
}

TEST(Phase, OddSymmetry) {
  const auto& geo = vdp_geo();
  for (State s : {State{0.5, 0.5}, State{-3.0, 1.5}, State{1.2, -0.3}}) {
    EXPECT_LT(std::abs(*phase_at(geo, -s) + *phase_at(geo, s)), 1e-4);
  }
}

TEST(Phase, FourierAverageAgrees) {
  const auto& geo = vdp_geo();
  SpectralOptions fo;
  fo.method = PhaseMethod::FourierAverage;
  for (State s : {State{0.5, 0.5}, State{-2.0, -1.0}}) {
    EXPECT_LT(ang(*phase_at(geo, s, {}, fo), *phase_at(geo, s)), 5e-3);
  }
}

TEST(Amplitude, EigenRelationInLogSpace) {
  const auto& geo = vdp_geo();
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  for (State s : {State{0.5, 0.5}, State{-3.0, 1.5}}) {
    const auto a0 = amplitude_at(geo, s);
    const auto a1 = amplitude_at(geo, flow(geo.system(), s, TimeScale::Slow, 0.2, cfg));
    ASSERT_TRUE(a0 && a1);
    EXPECT_EQ(a0->sign, a1->sign);
    EXPECT_NEAR(a1->log_abs - a0->log_abs, geo.cycle().floquet_nu * 0.2, 2e-3);
  }
}

TEST(Amplitude, NormalizedAtAnchor) {
  const auto& geo = vdp_geo();
  const State n = geo.anchor_normal();
  EXPECT_NEAR(norm(n), 1.0, 1e-14);
  const auto out = amplitude_at(geo, geo.cycle().anchor + 0.01 * n);
  const auto in = amplitude_at(geo, geo.cycle().anchor - 0.01 * n);
  ASSERT_TRUE(out && in);
  EXPECT_EQ(out->sign, 1);
  EXPECT_EQ(in->sign, -1);
  EXPECT_NEAR(std::exp(out->log_abs), 0.01, 1e-3);
}

TEST(Evaluation, EquilibriumAndBudget) {
  const auto& geo = vdp_geo();
  EXPECT_THROW(phase_at(geo, State{0.0, 0.0}), DomainError);
  EXPECT_THROW(amplitude_at(geo, State{0.0, 0.0}), DomainError);
  SpectralOptions tiny;
  tiny.max_steps = 5;
  EXPECT_FALSE(phase_at(geo, State{1e-3, 1e-3}, {}, tiny).has_value());
}

TEST(Geometry, NearestFindsCyclePoints) {
  const auto& geo = vdp_geo();
  for (double tau : {0.01, 1.234, 4.5}) {
    const CycleMatch m = geo.nearest(geo.cycle().at(tau), 0.1);
    EXPECT_NEAR(m.tau, tau, 1e-6);
    EXPECT_LT(m.distance, 1e-8);
  }
  EXPECT_NEAR(geo.weight(0.0), 0.0, 1e-15);
  // the weight integrates div - nu, so it closes over one period
  EXPECT_NEAR(geo.weight(geo.cycle().period), 0.0, 1e-6);
}

TEST(Grid, PhaseGridUnimodularWithExcludedOrigin) {
  const GridSpec g{-2.0, 2.0, -1.0, 1.0, 5, 5};
  const auto r = phase_grid(vdp_geo(), g, {}, {}, 2);
  EXPECT_TRUE(r.field.is_sentinel(g.index(2, 2)));
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (k == g.index(2, 2)) continue;
    ASSERT_FALSE(r.field.is_sentinel(k)) << k;
    EXPECT_NEAR(std::abs(r.field.values[k]), 1.0, 1e-14);
  }
  EXPECT_EQ(r.failures, 1u);
  EXPECT_EQ(r.field.meta.observable, "phase");
}

TEST(Grid, WorkerCountDoesNotChangeValues) {
  const GridSpec g{-3.0, 3.0, -1.5, 1.5, 7, 4};
  const auto a = amplitude_grid(vdp_geo(), g, {}, {}, 1);
  const auto b = amplitude_grid(vdp_geo(), g, {}, {}, 3);
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_EQ(a.field.values[k].sign, b.field.values[k].sign);
    if (!a.field.is_sentinel(k)) {
      EXPECT_EQ(a.field.values[k].log_abs, b.field.values[k].log_abs);
    }
  }
}

TEST(FiniteDifference, AngleOfPlaneWave) {
  // exp(i k x): the angle derivative is k even where the angle wraps
  const GridSpec g{-3.0, 3.0, 0.0, 1.0, 121, 3};
  ComplexField f(g);
  const double k = 2.5;
  for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = std::polar(1.0, k * g.node(i).x);
  const ScalarField d = finite_difference_field(f, Axis::X, Transform::Angle);
  for (double v : d.values) EXPECT_NEAR(v, k, 1e-12);
  const ScalarField dy = finite_difference_field(f, Axis::Y, Transform::Angle);
  for (double v : dy.values) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(FiniteDifference, SecondOrderInside) {
  auto max_err = [](std::size_t n) {
    const GridSpec g{0.0, 2.0, 0.0, 0.0, n, 1};
    ComplexField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f.values[i] = std::cos(3.0 * g.node(i).x);
    const ScalarField d = finite_difference_field(f, Axis::X, Transform::Re);
    double e = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) e = std::max(e, std::abs(d.values[i] + 3.0 * std::sin(3.0 * g.x(i))));
    return e;
  };
  EXPECT_NEAR(max_err(41) / max_err(81), 4.0, 0.2);
}

TEST(FiniteDifference, SentinelsPoisonNeighbours) {
  const GridSpec g{0.0, 4.0, 0.0, 0.0, 5, 1};
  ComplexField f(g);
  for (std::size_t i = 0; i < 5; ++i) f.values[i] = static_cast<double>(i);
  f.values[2] = Sentinel<std::complex<double>>::value();
  const ScalarField d = finite_difference_field(f, Axis::X, Transform::Re);
  EXPECT_FALSE(d.is_sentinel(0));
  EXPECT_TRUE(d.is_sentinel(1));
  EXPECT_TRUE(d.is_sentinel(2));
  EXPECT_TRUE(d.is_sentinel(3));
  EXPECT_FALSE(d.is_sentinel(4));
  EXPECT_DOUBLE_EQ(d.values[0], 1.0);
  EXPECT_DOUBLE_EQ(d.values[4], 1.0);
  EXPECT_THROW(finite_difference_field(f, Axis::Y, Transform::Re), DomainError);
}

TEST(GeneratorResidual, LinearSystemSecondOrder) {
  // x' = -x, y' = -y: phi = x^3 has lambda = -3; the central difference of x^3
  // is exact up to h^2 x, so the relative residual is h^2 / x^2
  const GenericSystem lin([](double x, double) { return -x; }, [](double, double y) { return -y; }, 1.0,
                          [](double, double) { return Jacobian{-1.0, 0.0, 0.0, -1.0}; });
  // residual at the shared node (1, 0)
  auto at_one = [&](std::size_t n) {
    const GridSpec g{0.5, 2.0, -1.0, 1.0, n, 5};
    ComplexField f(g);
    for (std::size_t k = 0; k < g.size(); ++k) f.values[k] = std::pow(g.node(k).x, 3);
    const ScalarField r = generator_residual(f, lin, -3.0);
    const std::size_t i = (n - 1) / 3, j = 2;
    EXPECT_DOUBLE_EQ(g.x(i), 1.0);
    EXPECT_DOUBLE_EQ(g.y(j), 0.0);
    EXPECT_NEAR(r.at(i, j), g.hx() * g.hx(), 1e-12);
    return r.at(i, j);
  };
  const double a = at_one(16), b = at_one(31);
  EXPECT_NEAR(a / b, 4.0, 1e-6);
  EXPECT_LT(b, 1e-2);

  LogRealField lf(GridSpec{0.5, 2.0, -1.0, 1.0, 31, 31});
  for (std::size_t k = 0; k < lf.grid.size(); ++k) lf.values[k] = LogReal{3.0 * std::log(lf.grid.node(k).x), 1};
  const ScalarField lr = generator_residual(lf, lin, -3.0);
  for (std::size_t j = 1; j + 1 < 31; ++j) {
    for (std::size_t i = 1; i + 1 < 31; ++i) EXPECT_LT(lr.at(i, j), 1e-2);
  }
}

TEST(GeneratorResidual, PhaseFieldNearCycle) {
  const auto& geo = vdp_geo();
  const GridSpec g{1.6, 2.2, -0.3, 0.3, 7, 7};
  const auto r = phase_grid(geo, g);
  const ScalarField res = generator_residual(r.field, geo.system(), {0.0, geo.cycle().omega});
  EXPECT_LT(res.at(3, 3), 1e-2);
}
