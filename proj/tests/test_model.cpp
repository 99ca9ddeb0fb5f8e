#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "koopman_sp/model.hpp"

using namespace koopman_sp;

namespace {

double bisect(const std::function<double(double)>& f, double lo, double hi) {
  double flo = f(lo);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double cubic_root(double y, double lo, double hi) {
  return bisect([y](double x) { return x * x * x / 3.0 - x - y; }, lo, hi);
}

}  // namespace

TEST(VanDerPol, FieldValues) {
  const VanDerPol v(0.1);
  EXPECT_DOUBLE_EQ(v.F(2.0, 0.5), 2.0 - 8.0 / 3.0 + 0.5);
  EXPECT_DOUBLE_EQ(v.G(2.0, 0.5), -2.0);
  const State fast = eval_vector_field(v, {2.0, 0.5}, TimeScale::Fast);
  const State slow = eval_vector_field(v, {2.0, 0.5}, TimeScale::Slow);
  EXPECT_NEAR(fast.y, 0.1 * -2.0, 1e-15);
  EXPECT_NEAR(slow.x, v.F(2.0, 0.5) / 0.1, 1e-13);
}

TEST(VanDerPol, JacobianMatchesFiniteDifferences) {
  const VanDerPol v(1.0);
  const double h = 1e-6;
  for (State s : {State{0.3, -0.2}, State{-1.7, 1.1}, State{2.5, 0.0}}) {
    const Jacobian j = v.jacobian(s.x, s.y);
    EXPECT_NEAR(j.Fx, (v.F(s.x + h, s.y) - v.F(s.x - h, s.y)) / (2 * h), 1e-8);
    EXPECT_NEAR(j.Fy, (v.F(s.x, s.y + h) - v.F(s.x, s.y - h)) / (2 * h), 1e-8);
    EXPECT_NEAR(j.Gx, (v.G(s.x + h, s.y) - v.G(s.x - h, s.y)) / (2 * h), 1e-8);
    EXPECT_NEAR(j.Gy, 0.0, 1e-12);
  }
}

TEST(VanDerPol, RejectsBadEpsilon) {
  EXPECT_THROW(VanDerPol(0.0), DomainError);
  EXPECT_THROW(VanDerPol(-1.0), DomainError);
  EXPECT_THROW(VanDerPol(std::nan("")), DomainError);
}

TEST(GenericSystem, MatchesBuiltin) {
  const GenericSystem g([](double x, double y) { return x - x * x * x / 3.0 + y; },
                        [](double x, double) { return -x; }, 0.5);
  const VanDerPol v(0.5);
  const Jacobian jg = g.jacobian(1.3, 0.4);
  const Jacobian jv = v.jacobian(1.3, 0.4);
  EXPECT_NEAR(jg.Fx, jv.Fx, 1e-6);
  EXPECT_NEAR(jg.Fy, jv.Fy, 1e-6);
  EXPECT_NEAR(jg.Gx, jv.Gx, 1e-6);
  EXPECT_NEAR(slow_divergence(g, {1.3, 0.4}), slow_divergence(v, {1.3, 0.4}), 1e-5);
}

TEST(Gamma, BisectionOracle) {
  EXPECT_NEAR(gamma(ManifoldBranch::WPlus, 2.0), cubic_root(2.0, 1.0, 4.0), 1e-13);
  EXPECT_NEAR(gamma(ManifoldBranch::WPlus, 2.0), 2.35530, 1e-5);
  for (double y : {-0.6, -0.3, 0.0, 0.2, 0.66, 1.0, 5.0, 40.0}) {
    EXPECT_NEAR(gamma(ManifoldBranch::WPlus, y), cubic_root(y, 1.0, 10.0), 1e-12) << y;
    EXPECT_NEAR(gamma(ManifoldBranch::WMinus, -y), -cubic_root(y, 1.0, 10.0), 1e-12) << y;
  }
  for (double y : {-0.66, -0.3, 0.0, 0.1, 0.5, 0.66}) {
    EXPECT_NEAR(gamma(ManifoldBranch::WZero, y), cubic_root(y, -1.0, 1.0), 1e-12) << y;
  }
}

TEST(Gamma, OddSymmetryIsExact) {
  for (double y : {-0.5, 0.1, 0.3, 2.0, 7.5}) {
    EXPECT_EQ(gamma(ManifoldBranch::WMinus, -y), -gamma(ManifoldBranch::WPlus, y));
  }
  EXPECT_EQ(gamma(ManifoldBranch::WZero, -0.4), -gamma(ManifoldBranch::WZero, 0.4));
}

TEST(Gamma, DomainsAndClosure) {
  EXPECT_THROW(gamma(ManifoldBranch::WPlus, -2.0 / 3.0), DomainError);
  EXPECT_THROW(gamma(ManifoldBranch::WMinus, 0.7), DomainError);
  EXPECT_THROW(gamma(ManifoldBranch::WZero, 0.7), DomainError);
  EXPECT_THROW(gamma(ManifoldBranch::WPlus, std::nan("")), DomainError);
  EXPECT_NEAR(gamma_closure(ManifoldBranch::WPlus, -2.0 / 3.0), 1.0, 1e-7);
  EXPECT_NEAR(gamma_closure(ManifoldBranch::WMinus, 2.0 / 3.0), -1.0, 1e-7);
}

TEST(Regions, Classification) {
  EXPECT_EQ(classify_region({0.0, 1.0}), Region::DPlus);
  EXPECT_EQ(classify_region({0.0, -1.0}), Region::DMinus);
  EXPECT_EQ(classify_region({0.5, 0.0}), Region::DPlus);
  EXPECT_EQ(classify_region({-0.5, 0.0}), Region::DMinus);
  EXPECT_EQ(classify_region({0.0, 0.0}), Region::OnW0);
  // B- and B+ belong to D- and D+
  EXPECT_EQ(classify_region({-3.0, 2.0 / 3.0}), Region::DMinus);
  EXPECT_EQ(classify_region({3.0, -2.0 / 3.0}), Region::DPlus);
}

TEST(ConstrainedStateTest, Invariants) {
  const ConstrainedState a = ConstrainedState::on_manifold(2.0);
  EXPECT_EQ(a.branch(), ManifoldBranch::WPlus);
  EXPECT_EQ(a.sign(), 1);
  EXPECT_DOUBLE_EQ(a.ybar(), 8.0 / 3.0 - 2.0);
  EXPECT_THROW(ConstrainedState(ManifoldBranch::WPlus, 0.5), DomainError);
  EXPECT_THROW(ConstrainedState(ManifoldBranch::WMinus, 1.5), DomainError);
  EXPECT_THROW(ConstrainedState(ManifoldBranch::WZero, 0.0), DomainError);
  EXPECT_TRUE(ConstrainedState::on_manifold(-1.0).at_singular_point());
}

TEST(ProjectPi, SlidesAlongConstantY) {
  const ConstrainedState p = project_pi({0.5, 2.0});
  EXPECT_EQ(p.branch(), ManifoldBranch::WPlus);
  EXPECT_NEAR(p.xbar(), cubic_root(2.0, 1.0, 4.0), 1e-12);
  const ConstrainedState m = project_pi({-3.0, -0.1});
  EXPECT_EQ(m.branch(), ManifoldBranch::WMinus);
  EXPECT_NEAR(m.xbar(), -cubic_root(0.1, 1.0, 4.0), 1e-12);
  // B- lands on the singular point J-
  const ConstrainedState j = project_pi({-5.0, 2.0 / 3.0});
  EXPECT_NEAR(j.xbar(), -1.0, 1e-7);
  EXPECT_THROW(project_pi({0.0, 0.0}), ProjectionUndefined);
  EXPECT_THROW(project_pi({std::nan(""), 0.0}), DomainError);
}

TEST(ProjectPi, Idempotent) {
  for (State s : {State{0.9, 1.3}, State{-2.2, 0.4}, State{0.2, -0.5}, State{4.0, -1.9}}) {
    const ConstrainedState p = project_pi(s);
    EXPECT_EQ(project_pi(p.to_state()), p);
  }
}
