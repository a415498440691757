#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "pinney/exact.hpp"

using namespace pinney;

namespace {

// x'' + Omega(eps t)^2 x = k / x^3: no damping, slowly varying frequency.
auto undamped_field(FrequencyProfile p, double eps, double k) {
  return [p = std::move(p), eps, k](double t, const State<2>& y) {
    const double w = omega_eval(p, eps, t);
    return State<2>{y[1], -w * w * y[0] + k / (y[0] * y[0] * y[0])};
  };
}

}  // namespace

TEST(Superposition, EquilibriumIsConstant) {
  const auto sol = build_superposition(1.0, FrequencyProfile::constant(1.0), 0.0, 1.0, 0.0, 0.0, 20.0);
  EXPECT_DOUBLE_EQ(sol.c1, 1.0);
  EXPECT_DOUBLE_EQ(sol.c2, 1.0);
  EXPECT_DOUBLE_EQ(sol.c3, 0.0);
  const auto p = eval_superposition(sol, 17.3);
  EXPECT_NEAR(p.x, 1.0, 1e-10);
  EXPECT_NEAR(p.v, 0.0, 1e-10);
}

TEST(Superposition, ClosedFormForQuarterK) {
  // x^2 = cos^2 t + k sin^2 t for omega = 1, x(0) = 1, x'(0) = 0.
  const double k = 0.25;
  const auto sol = build_superposition(k, FrequencyProfile::constant(1.0), 0.0, 1.0, 0.0, 0.0, 30.0);
  for (int i = 0; i <= 300; ++i) {
    const double t = 0.1 * i;
    const double c = std::cos(t), s = std::sin(t);
    const double x = std::sqrt(c * c + k * s * s);
    const double v = (k - 1.0) * s * c / x;
    const auto p = eval_superposition(sol, t);
    EXPECT_NEAR(p.x, x, 1e-9);
    EXPECT_NEAR(p.v, v, 1e-9);
  }
  const auto half = eval_superposition(sol, std::numbers::pi / 2);
  EXPECT_NEAR(half.x, 0.5, 1e-10);
  EXPECT_NEAR(half.v, 0.0, 1e-9);
}

TEST(Superposition, NegativeKHitsNegativeRadicandAfterCollapse) {
  const auto sol = build_superposition(-0.5, FrequencyProfile::constant(1.0), 0.0, 1.0, 0.0, 0.0, 3.0);
  const double t_star = std::atan(std::sqrt(2.0));  // root of cos^2 t - 0.5 sin^2 t
  EXPECT_NO_THROW((void)eval_superposition(sol, t_star - 1e-3));
  for (double t : {t_star + 1e-6, t_star + 0.3, 2.0}) {
    try {
      (void)eval_superposition(sol, t);
      FAIL() << "t = " << t;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::NegativeRadicand);
    }
  }
}

TEST(Superposition, ErrorPaths) {
  try {
    (void)build_superposition(1.0, FrequencyProfile::constant(1.0), 0.0, 0.0, 1.0, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoRealConstants);
  }
  const auto sol = build_superposition(1.0, FrequencyProfile::constant(1.0), 0.0, 1.0, 0.0, 0.0, 1.0);
  try {
    (void)eval_superposition(sol, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(Superposition, MatchesDirectIntegrationDecayingProfile) {
  const auto prof = FrequencyProfile::decaying(1.0);
  const auto sol = build_superposition(1.0, prof, 0.1, 2.41, 0.0, 0.0, 50.0);
  const auto times = uniform_times(0.0, 50.0, 1001);
  IntegratorOptions o;
  o.tol = {1e-12, 1e-12};
  const auto traj = integrate(undamped_field(prof, 0.1, 1.0), {2.41, 0.0}, 0.0, 50.0, times, o);
  for (const auto& s : traj.samples) EXPECT_NEAR(eval_superposition(sol, s.t).x, s.x, 1e-7) << s.t;
}

TEST(Superposition, PropertyAgreementWronskianConstraint) {
  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> ux(0.3, 3.0), uv(-1.5, 1.5), uk(0.05, 2.0), ue(0.0, 0.2);
  const std::vector<FrequencyProfile> profiles{FrequencyProfile::constant(1.0), FrequencyProfile::decaying(1.2),
                                               FrequencyProfile::growing(0.9),
                                               FrequencyProfile::oscillating(1.0, 0.6)};
  const auto times = uniform_times(0.0, 50.0, 501);
  IntegratorOptions o;
  o.tol = {1e-12, 1e-12};
  for (int trial = 0; trial < 12; ++trial) {
    const auto& prof = profiles[trial % profiles.size()];
    const double x0 = ux(rng), v0 = uv(rng), k = uk(rng), eps = ue(rng);
    const auto sol = build_superposition(k, prof, eps, x0, v0, 0.0, 50.0);
    EXPECT_NEAR(sol.c1 * sol.c2 - sol.c3 * sol.c3, k, 1e-12);
    const auto traj = integrate(undamped_field(prof, eps, k), {x0, v0}, 0.0, 50.0, times, o);
    for (const auto& s : traj.samples) {
      EXPECT_NEAR(eval_superposition(sol, s.t).x, s.x, 1e-7) << "trial " << trial << " t " << s.t;
      EXPECT_NEAR(sol.wronskian(s.t), 1.0, 1e-8);
    }
  }
}

TEST(Energy, Examples) {
  const PinneyParams p{0.0, 1.0, FrequencyProfile::constant(1.0)};
  EXPECT_DOUBLE_EQ(energy(p, 0.0, 1.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(energy(p, 0.0, 2.0, 0.0), 2.125);
  // Fig. 1 initial data: close to the adiabatic value Omega(Omega0 A0^2/2 + sqrt k) = 3.
  const PinneyParams fig1{0.1, 1.0, FrequencyProfile::constant(1.0)};
  EXPECT_NEAR(energy(fig1, 0.0, 2.41, -0.17), 3.0, 0.01);
  EXPECT_THROW((void)energy(p, 0.0, 0.0, 1.0), Error);
}

TEST(Energy, ConservedUndampedDecreasingDamped) {
  const auto times = uniform_times(0.0, 60.0, 6001);
  const PinneyParams undamped{0.0, 0.8, FrequencyProfile::constant(1.0)};
  auto traj = integrate(damped_pinney_field(undamped), {2.0, 0.3}, 0.0, 60.0, times);
  const double e0 = energy(undamped, 0.0, 2.0, 0.3);
  for (const auto& s : traj.samples) EXPECT_LT(std::abs(energy(undamped, s.t, s.x, s.v) - e0), 1e-7 * e0);

  // Damped: sample at period marks (the orbit period is pi for omega = 1).
  const PinneyParams damped{0.05, 0.8, FrequencyProfile::constant(1.0)};
  std::vector<double> marks;
  for (int i = 0; i <= 19; ++i) marks.push_back(std::numbers::pi * i);
  traj = integrate(damped_pinney_field(damped), {2.0, 0.3}, 0.0, marks.back(), marks);
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    const auto& a = traj.samples[i - 1];
    const auto& b = traj.samples[i];
    EXPECT_LT(energy(damped, b.t, b.x, b.v), energy(damped, a.t, a.x, a.v));
  }
}
