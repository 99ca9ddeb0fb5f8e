#include <gtest/gtest.h>

#include <cmath>

#include "koopman_sp/model.hpp"
#include "koopman_sp/ode.hpp"

using namespace koopman_sp;

namespace {

// x' = y, y' = -x; exact solution is a rotation
auto rotation = [](double, const Vec<2>& v) -> Vec<2> { return {v[1], -v[0]}; };

Vec<2> rotation_exact(double t) { return {std::cos(t), -std::sin(t)}; }

Vec<2> final_state(const IntegratorConfig& cfg, double t_end) {
  Vec<2> last{1.0, 0.0};
  integrate_ode<2>(rotation, 0.0, Vec<2>{1.0, 0.0}, t_end, cfg, [&](const DenseSegment<2>& seg) {
    last = seg.end();
    return true;
  });
  return last;
}

}  // namespace

TEST(DormandPrince, LinearRotation) {
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  const Vec<2> y = final_state(cfg, 10.0);
  const Vec<2> e = rotation_exact(10.0);
  EXPECT_NEAR(y[0], e[0], 1e-8);
  EXPECT_NEAR(y[1], e[1], 1e-8);
}

TEST(DormandPrince, DenseOutputBetweenSteps) {
  IntegratorConfig cfg;
  cfg.rtol = 1e-10;
  cfg.atol = 1e-12;
  double worst = 0.0;
  integrate_ode<2>(rotation, 0.0, Vec<2>{1.0, 0.0}, 6.0, cfg, [&](const DenseSegment<2>& seg) {
    for (double s : {0.25, 0.5, 0.75}) {
      const double t = seg.t0 + s * seg.h;
      const Vec<2> v = seg(t);
      const Vec<2> e = rotation_exact(t);
      worst = std::max(worst, std::hypot(v[0] - e[0], v[1] - e[1]));
    }
    return true;
  });
  EXPECT_LT(worst, 1e-7);
}

TEST(DormandPrince, ToleranceControlsError) {
  IntegratorConfig loose;
  loose.rtol = 1e-5;
  loose.atol = 1e-7;
  IntegratorConfig tight;
  tight.rtol = 1e-11;
  tight.atol = 1e-13;
  const Vec<2> e = rotation_exact(8.0);
  const Vec<2> a = final_state(loose, 8.0);
  const Vec<2> b = final_state(tight, 8.0);
  const double ea = std::hypot(a[0] - e[0], a[1] - e[1]);
  const double eb = std::hypot(b[0] - e[0], b[1] - e[1]);
  EXPECT_LT(eb, ea);
  EXPECT_LT(eb, 1e-9);
}

TEST(RungeKutta4, FourthOrderConvergence) {
  IntegratorConfig cfg;
  cfg.method = Method::RungeKutta4;
  const Vec<2> e = rotation_exact(2.0);
  cfg.fixed_step = 0.02;
  const Vec<2> a = final_state(cfg, 2.0);
  cfg.fixed_step = 0.01;
  const Vec<2> b = final_state(cfg, 2.0);
  const double ea = std::hypot(a[0] - e[0], a[1] - e[1]);
  const double eb = std::hypot(b[0] - e[0], b[1] - e[1]);
  EXPECT_NEAR(ea / eb, 16.0, 1.0);
}

TEST(Flow, DormandPrinceAgreesWithRk4OnVanDerPol) {
  const VanDerPol sys(1.0);
  IntegratorConfig rk;
  rk.method = Method::RungeKutta4;
  rk.fixed_step = 1e-3;
  IntegratorConfig dp;
  dp.rtol = 1e-11;
  dp.atol = 1e-13;
  const State a = flow(sys, {0.5, 0.3}, TimeScale::Slow, 5.0, rk);
  const State b = flow(sys, {0.5, 0.3}, TimeScale::Slow, 5.0, dp);
  EXPECT_LT(norm(a - b), 1e-8);
}

TEST(Flow, TimeScalesAgree) {
  const VanDerPol sys(0.1);
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  const State a = flow(sys, {1.0, 0.5}, TimeScale::Slow, 0.7, cfg);
  const State b = flow(sys, {1.0, 0.5}, TimeScale::Fast, 7.0, cfg);
  EXPECT_LT(norm(a - b), 1e-9);
}

TEST(Flow, SemigroupProperty) {
  const VanDerPol sys(1.0);
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  const State once = flow(sys, {-1.0, 1.0}, TimeScale::Slow, 3.0, cfg);
  const State twice = flow(sys, flow(sys, {-1.0, 1.0}, TimeScale::Slow, 1.2, cfg), TimeScale::Slow, 1.8, cfg);
  EXPECT_LT(norm(once - twice), 1e-8);
}

TEST(Flow, TrajectoryAndDenseEndpointsMatch) {
  const VanDerPol sys(0.5);
  const Trajectory tr = integrate(sys, {2.0, 0.0}, TimeScale::Slow, 2.0);
  const DenseTrajectory dt = integrate_dense(sys, {2.0, 0.0}, TimeScale::Slow, 2.0);
  EXPECT_DOUBLE_EQ(tr.times.back(), 2.0);
  EXPECT_NEAR(dt.duration(), 2.0, 1e-12);
  EXPECT_LT(norm(tr.back() - dt.at(2.0)), 1e-12);
  EXPECT_EQ(tr.states.front(), (State{2.0, 0.0}));
}

TEST(Flow, Errors) {
  const VanDerPol sys(1.0);
  EXPECT_THROW(flow(sys, {0.1, 0.1}, TimeScale::Slow, -1.0), DomainError);
  EXPECT_THROW(flow(sys, {std::nan(""), 0.1}, TimeScale::Slow, 1.0), DomainError);
  IntegratorConfig tiny;
  tiny.max_steps = 3;
  EXPECT_THROW(flow(sys, {0.1, 0.1}, TimeScale::Slow, 50.0, tiny), StiffnessError);
  IntegratorConfig bad;
  bad.rtol = 0.0;
  EXPECT_THROW(flow(sys, {0.1, 0.1}, TimeScale::Slow, 1.0, bad), DomainError);
}

TEST(Flow, BlowUpIsReported) {
  // x' = x^2 from x = 1 blows up at t = 1
  auto rhs = [](double, const Vec<1>& v) -> Vec<1> { return {v[0] * v[0]}; };
  EXPECT_THROW(integrate_ode<1>(rhs, 0.0, Vec<1>{1.0}, 2.0, IntegratorConfig{},
                                [](const DenseSegment<1>&) { return true; }),
               Error);
}

TEST(Section, CrossingOnPositiveXAxis) {
  const VanDerPol sys(1.0);
  const SectionHit hit =
      integrate_until_section(sys, {-1.0, -1.0}, TimeScale::Slow, Section::phase_section(), {}, 50.0);
  EXPECT_NEAR(hit.state.y, 0.0, 1e-10);
  EXPECT_GT(hit.state.x, 0.0);
  // y is decreasing there: G = -x < 0
  EXPECT_LT(sys.G(hit.state.x, hit.state.y), 0.0);
  IntegratorConfig cfg;
  cfg.rtol = 1e-11;
  cfg.atol = 1e-13;
  const State again = flow(sys, {-1.0, -1.0}, TimeScale::Slow, hit.time, cfg);
  EXPECT_LT(norm(again - hit.state), 1e-7);
}

TEST(Section, NoEventWithinHorizon) {
  const VanDerPol sys(1.0);
  EXPECT_THROW(integrate_until_section(sys, {-1.0, -1.0}, TimeScale::Slow, Section::phase_section(), {}, 0.01),
               NoEventError);
}
