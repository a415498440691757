#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "pinney/kostin.hpp"

using namespace pinney;

namespace {

IntegratorOptions tight() {
  IntegratorOptions o;
  o.tol = {1e-12, 1e-12};
  return o;
}

double grid_normalization(const QuantumFields& f, std::size_t it) {
  const double h = f.q[1] - f.q[0];
  double sum = 0.0;
  for (std::size_t j = 0; j < f.q.size(); ++j) {
    sum += (j == 0 || j + 1 == f.q.size() ? 0.5 : 1.0) * f.n[f.index(it, j)];
  }
  return sum * h;
}

}  // namespace

TEST(Density, Examples) {
  EXPECT_NEAR(density(1.0, 0.0, 0.0), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(density(1.0, 0.0, 0.0), 0.5642, 1e-4);
  EXPECT_NEAR(density(1.0, 0.0, 1.0), std::exp(-1.0) / std::sqrt(std::numbers::pi), 1e-15);
  EXPECT_NEAR(density(1.0, 0.0, 1.0), 0.2076, 1e-4);
  EXPECT_THROW((void)density(0.0, 0.0, 0.0), Error);
  EXPECT_THROW((void)density(-1.0, 0.0, 0.0), Error);
}

TEST(Density, TrapezoidNormalization) {
  const auto q = uniform_times(-20.0, 20.0, 4001);
  double sum = 0.0;
  for (std::size_t j = 0; j < q.size(); ++j) sum += (j == 0 || j + 1 == q.size() ? 0.5 : 1.0) * density(2.41, 1.0, q[j]);
  EXPECT_NEAR(sum * (q[1] - q[0]), 1.0, 1e-10);
  for (double x : {0.05, 0.3, 1.0, 7.5}) EXPECT_NEAR(slice_normalization(x, -3.0), 1.0, 1e-10);
}

TEST(Velocity, Examples) {
  EXPECT_DOUBLE_EQ(velocity_field(2.0, 0.7, 1.5, -0.3, 1.5), -0.3);
  for (double q : {-4.0, 0.0, 9.0}) EXPECT_DOUBLE_EQ(velocity_field(2.0, 0.0, 1.5, 0.25, q), 0.25);
  try {
    (void)velocity_field(0.0, 1.0, 0.0, 0.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveWidth);
  }
}

TEST(Velocity, AtOriginForReferenceRun) {
  const auto params = kostin_reference_params();
  const auto start = eval_x0({params.pinney(), 4.0, 0.0, 0.0}, 0.0);
  const auto series = evolve_kostin(params, 10.0, KostinMode::Asymptotic, 11);
  const auto u0 = velocity_at(series, 0.0);
  EXPECT_NEAR(u0[0], -start.v / start.x * 1.0 + 0.0, 1e-15);
}

TEST(KostinParams, InverseCubicCoefficient) {
  KostinParams p;
  p.hbar = 0.3;
  p.mass = 1.7;
  EXPECT_DOUBLE_EQ(p.pinney().k, 0.09 / (1.7 * 1.7));
  p.hbar = 0.0;
  EXPECT_THROW(p.validate(), Error);
  p.hbar = 1.0;
  p.width_init = WidthState{0.0, 0.0};
  try {
    p.validate();
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveWidth);
  }
}

TEST(Evolve, StationaryPacket) {
  KostinParams p;
  p.eps = 0.0;
  p.hbar = 0.5;
  p.mass = 2.0;
  p.profile = FrequencyProfile::constant(1.5);
  p.q_cl_init = {0.0, 0.0};
  const double x_fp = std::sqrt(p.hbar / (p.mass * 1.5));
  p.width_init = WidthState{x_fp, 0.0};
  for (auto mode : {KostinMode::Numeric, KostinMode::Asymptotic}) {
    const auto series = evolve_kostin(p, 30.0, mode, 301);
    for (const auto& s : series.samples) {
      EXPECT_NEAR(s.x, x_fp, 1e-8);
      EXPECT_DOUBLE_EQ(s.q_cl, 0.0);
    }
    const auto f = build_fields(series);
    EXPECT_LT(continuity_residual(f), 1e-10);
  }
}

TEST(Evolve, CenterIsIndependentOfWidth) {
  const auto params = kostin_reference_params();
  const auto times = uniform_times(0.0, 60.0, 400);
  const auto alone = evolve_center(params, 60.0, times);
  for (auto mode : {KostinMode::Numeric, KostinMode::Asymptotic}) {
    const auto both = evolve_kostin(params, 60.0, mode, times);
    ASSERT_EQ(both.samples.size(), alone.q.size());
    for (std::size_t i = 0; i < alone.q.size(); ++i) {
      EXPECT_EQ(both.samples[i].q_cl, alone.q[i]);
      EXPECT_EQ(both.samples[i].q_cl_dot, alone.qdot[i]);
    }
  }
}

TEST(Evolve, NumericAndAsymptoticWidthsConvergeInEps) {
  // Same slow-time window s = eps t in [0, 6] for each eps.
  double prev = 0.0;
  for (double eps : {0.1, 0.05, 0.025}) {
    auto p = kostin_reference_params();
    p.eps = eps;
    const double t_end = 6.0 / eps;
    const auto n = static_cast<std::size_t>(t_end * 20) + 1;
    const auto a = evolve_kostin(p, t_end, KostinMode::Asymptotic, n, tight());
    const auto b = evolve_kostin(p, t_end, KostinMode::Numeric, n, tight());
    double worst = 0.0;
    for (std::size_t i = 0; i < a.samples.size(); ++i) worst = std::max(worst, std::abs(a.samples[i].x - b.samples[i].x));
    if (eps == 0.1) {
      EXPECT_LT(worst, 0.36);  // measured 0.347, peaking where Omega(eps t) ~ 0.3
    }
    if (prev > 0.0) {
      EXPECT_GT(prev / worst, 2.0) << eps;
    }
    prev = worst;
  }
}

TEST(Evolve, AsymptoticFitsPhaseSpaceData) {
  auto p = kostin_reference_params();
  const auto start = eval_x0({p.pinney(), 4.0, 0.0, 0.0}, 0.0);
  auto q = p;
  q.width_init = WidthState{start.x, start.v};
  const auto a = evolve_kostin(p, 20.0, KostinMode::Asymptotic, 101);
  const auto b = evolve_kostin(q, 20.0, KostinMode::Asymptotic, 101);
  for (std::size_t i = 0; i < a.samples.size(); ++i) EXPECT_NEAR(a.samples[i].x, b.samples[i].x, 1e-6);
}

TEST(Evolve, DampedPacketRelaxes) {
  KostinParams p;
  p.eps = 0.1;
  p.profile = FrequencyProfile::constant(1.0);
  p.q_cl_init = {1.0, 0.0};
  p.width_init = WidthOrbit{2.0, 0.0, 0.0};
  const auto series = evolve_kostin(p, 120.0, KostinMode::Numeric, 12001, tight());
  // Envelopes over successive windows of one width period (pi) and one centre period (2 pi).
  auto window_max = [&](double t0, double t1, auto&& value) {
    double m = 0.0;
    for (const auto& s : series.samples) {
      if (s.t >= t0 && s.t < t1) m = std::max(m, value(s));
    }
    return m;
  };
  const double x_fp = 1.0;
  double prev_w = 1e9, prev_c = 1e9;
  for (int j = 0; j < 18; ++j) {
    const double w = window_max(2 * std::numbers::pi * j, 2 * std::numbers::pi * (j + 1),
                                [&](const KostinSample& s) { return std::abs(s.x - x_fp); });
    const double c = window_max(2 * std::numbers::pi * j, 2 * std::numbers::pi * (j + 1),
                                [](const KostinSample& s) { return std::abs(s.q_cl); });
    EXPECT_LT(w, prev_w);
    EXPECT_LT(c, prev_c);
    prev_w = w;
    prev_c = c;
  }
  EXPECT_LT(prev_w, 1e-4);
  EXPECT_LT(prev_c, 1e-4);
}

TEST(Fields, ReferenceRunNormalizedPerSlice) {
  const auto series = evolve_kostin(kostin_reference_params(), 60.0, KostinMode::Asymptotic, 400);
  const auto f = build_fields(series);
  ASSERT_EQ(f.q.size(), 400u);
  ASSERT_EQ(f.t.size(), 400u);
  for (std::size_t it = 0; it < f.t.size(); ++it) {
    EXPECT_NEAR(grid_normalization(f, it), 1.0, 1e-8) << f.t[it];
    const auto& s = series.samples[it];
    EXPECT_NEAR(slice_normalization(s.x, s.q_cl), 1.0, 1e-8);
  }
  // Positive wherever exp(-z^2) is representable; it underflows to 0 past ~26 widths.
  for (std::size_t it = 0; it < f.t.size(); ++it) {
    const auto& s = series.samples[it];
    for (std::size_t j = 0; j < f.q.size(); ++j) {
      const double n = f.n[f.index(it, j)];
      EXPECT_GE(n, 0.0);
      if (std::abs(f.q[j] - s.q_cl) < 25.0 * s.x) {
        EXPECT_GT(n, 0.0);
      }
    }
  }
}

TEST(Fields, ContinuityResidualIsStencilError) {
  // Near-equilibrium packet (A0 = 0.25, width >= 0.72): dt = 0.1 is already in
  // the 4th-order regime (measured 2.0e-3 at 400 samples, 12x per halving).
  KostinParams p = kostin_reference_params();
  p.width_init = WidthOrbit{0.25, 0.0, 0.0};
  const auto q = uniform_times(-10.0, 10.0, 400);
  auto residual = [&](KostinMode mode, std::size_t nt) {
    return continuity_residual(build_fields(evolve_kostin(p, 40.0, mode, nt, tight()), q));
  };
  EXPECT_LT(residual(KostinMode::Numeric, 400), 3e-3);
  EXPECT_LT(residual(KostinMode::Asymptotic, 400), 3e-3);
  EXPECT_GE(residual(KostinMode::Numeric, 200) / residual(KostinMode::Numeric, 400), 3.5);
  EXPECT_GE(residual(KostinMode::Asymptotic, 200) / residual(KostinMode::Asymptotic, 400), 3.5);
}

TEST(Fields, ReferencePacketNeedsFinerTimeSampling) {
  // With A0 = 4 the width dips to ~0.25 over ~0.1 time units, so 400 samples
  // on [0, 40] under-resolve it; the 4th-order regime starts near 1600.
  const auto q = uniform_times(-10.0, 10.0, 400);
  auto residual = [&](std::size_t nt) {
    return continuity_residual(build_fields(evolve_kostin(kostin_reference_params(), 40.0, KostinMode::Numeric, nt, tight()), q));
  };
  const double r1600 = residual(1600), r3200 = residual(3200);
  EXPECT_GE(r1600 / r3200, 3.5);
  EXPECT_LT(r3200, 1e-2);
}

TEST(Fields, GridTooCoarse) {
  const auto series = evolve_kostin(kostin_reference_params(), 10.0, KostinMode::Asymptotic, 4);
  try {
    (void)continuity_residual(build_fields(series));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::GridTooCoarse);
  }
}
