#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "pinney/frequency.hpp"

using namespace pinney;

namespace {

// Independent reference: Gauss-Kronrod on Omega(eps t), subdivided into unit
// panels so oscillatory integrands stay resolved.
double reference_phase(const FrequencyProfile& p, double eps, double t0, double t1) {
  using boost::math::quadrature::gauss_kronrod;
  const int panels = std::max(1, static_cast<int>(std::ceil(std::abs(t1 - t0))));
  const double w = (t1 - t0) / panels;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double a = t0 + i * w;
    sum += gauss_kronrod<double, 31>::integrate([&](double t) { return p.at(eps * t); }, a, a + w, 15, 1e-14);
  }
  return sum;
}

std::vector<FrequencyProfile> analytic_profiles() {
  return {FrequencyProfile::constant(1.3), FrequencyProfile::decaying(1.0), FrequencyProfile::growing(0.8),
          FrequencyProfile::oscillating(1.0, 0.7)};
}

}  // namespace

TEST(OmegaEval, ClosedFormExamples) {
  EXPECT_DOUBLE_EQ(omega_eval(FrequencyProfile::constant(1.0), 0.1, 7.0), 1.0);
  EXPECT_NEAR(omega_eval(FrequencyProfile::decaying(1.0), 0.1, 10.0), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_DOUBLE_EQ(omega_eval(FrequencyProfile::oscillating(1.0, 0.7), 0.1, 0.0), 1.0);
  EXPECT_NEAR(omega_eval(FrequencyProfile::growing(2.0), 0.1, 10.0), 2.0 * std::sqrt(2.0), 1e-14);
}

TEST(OmegaEval, RejectsInvalidProfiles) {
  EXPECT_THROW(FrequencyProfile::constant(0.0), Error);
  EXPECT_THROW(FrequencyProfile::constant(-1.0), Error);
  EXPECT_THROW(FrequencyProfile::oscillating(1.0, 1.0), Error);
  EXPECT_THROW(FrequencyProfile::oscillating(1.0, 0.0), Error);
  try {
    FrequencyProfile::tabulated({-1, 0, 1, 2}, {1.0, 0.5, -0.2, 1.0});
    FAIL() << "expected NonPositiveFrequency";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveFrequency);
  }
  EXPECT_THROW(FrequencyProfile::tabulated({0, 2, 1, 3}, {1, 1, 1, 1}), Error);
}

TEST(OmegaEval, SlopeMatchesFiniteDifference) {
  for (const auto& p : analytic_profiles()) {
    for (double s : {-1.2, 0.0, 0.3, 2.5}) {
      const double h = 1e-5;
      const double fd = (p.at(s + h) - p.at(s - h)) / (2 * h);
      EXPECT_NEAR(p.slope(s), fd, 1e-8) << to_string(p.kind()) << " s=" << s;
    }
  }
}

TEST(PhaseIntegral, Examples) {
  EXPECT_NEAR(phase_integral(FrequencyProfile::constant(1.0), 0.1, 0.0, std::numbers::pi), std::numbers::pi,
              1e-15);
  EXPECT_NEAR(phase_integral(FrequencyProfile::oscillating(1.0, 0.7), 0.1, 0.0, 5.0),
              5.0 + 0.7 * (1.0 - std::cos(1.0)) / 0.2, 1e-13);
  // asinh(1)/0.1, cross-checked against quadrature at the 1e-10 level.
  const auto dec = FrequencyProfile::decaying(1.0);
  const double closed = phase_integral(dec, 0.1, 0.0, 10.0);
  EXPECT_NEAR(closed, std::asinh(1.0) / 0.1, 1e-12);
  EXPECT_NEAR(closed, 8.81373587019543, 1e-12);
  EXPECT_NEAR(closed, reference_phase(dec, 0.1, 0.0, 10.0), 1e-10);
  EXPECT_NEAR(closed, adaptive_simpson([&](double t) { return dec.at(0.1 * t); }, 0.0, 10.0, 1e-10), 1e-10);
}

TEST(PhaseIntegral, ClosedFormAgreesWithQuadrature) {
  for (const auto& p : analytic_profiles()) {
    for (double eps : {0.0, 0.01, 0.1, 0.2}) {
      for (double t : {3.0, 37.5, 100.0}) {
        EXPECT_NEAR(phase_integral(p, eps, 0.0, t), reference_phase(p, eps, 0.0, t), 1e-8)
            << to_string(p.kind()) << " eps=" << eps << " t=" << t;
      }
    }
  }
}

TEST(PhaseIntegral, AdditiveAndMonotone) {
  for (const auto& p : analytic_profiles()) {
    for (double eps : {0.05, 0.2}) {
      const double t0 = -3.0, t1 = 11.7, t2 = 64.2;
      EXPECT_NEAR(phase_integral(p, eps, t0, t1) + phase_integral(p, eps, t1, t2), phase_integral(p, eps, t0, t2),
                  1e-9);
      EXPECT_NEAR(phase_integral(p, eps, t1, t0), -phase_integral(p, eps, t0, t1), 1e-12);
      double prev = phase_integral(p, eps, 0.0, 0.0);
      for (int i = 1; i <= 400; ++i) {
        const double cur = phase_integral(p, eps, 0.0, 0.25 * i);
        EXPECT_GT(cur, prev);
        prev = cur;
      }
    }
  }
}

TEST(Tabulated, InterpolatesSmoothProfileAndIntegrates) {
  // Sample the growing profile on s in [-1, 3] and compare.
  std::vector<double> s, w;
  for (int i = 0; i <= 400; ++i) {
    const double si = -1.0 + 0.01 * i;
    s.push_back(si);
    w.push_back(std::sqrt(1.0 + si * si));
  }
  const auto tab = FrequencyProfile::tabulated(s, w);
  const auto exact = FrequencyProfile::growing(1.0);
  EXPECT_EQ(tab.kind(), ProfileKind::Tabulated);
  EXPECT_NEAR(tab.omega0(), 1.0, 1e-12);
  for (double si : {-0.995, 0.0, 0.123, 1.7, 2.999}) {
    EXPECT_NEAR(tab.at(si), exact.at(si), 1e-5);
    EXPECT_NEAR(tab.slope(si), exact.slope(si), 1e-3);
  }
  const double eps = 0.1;
  EXPECT_NEAR(phase_integral(tab, eps, 0.0, 25.0), phase_integral(exact, eps, 0.0, 25.0), 1e-4);
  // The interpolant is cubic between nodes, so Simpson's rule on the node
  // intervals integrates it exactly; the adaptive path must agree to 1e-10.
  double exact_pieces = 0.0;
  for (int i = 100; i < 350; ++i) {
    const double a = s[i] / eps, b = s[i + 1] / eps;
    exact_pieces += (b - a) / 6.0 * (tab.at(s[i]) + 4.0 * tab.at(0.5 * (s[i] + s[i + 1])) + tab.at(s[i + 1]));
  }
  EXPECT_NEAR(phase_integral(tab, eps, 0.0, 25.0), exact_pieces, 1e-10);

  try {
    (void)omega_eval(tab, eps, 35.0);
    FAIL() << "expected OutOfRange";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::OutOfRange);
  }
}

TEST(Tabulated, MonotoneInterpolantStaysPositive) {
  // Steep data where an unconstrained cubic spline would overshoot below zero.
  const auto tab = FrequencyProfile::tabulated({-1, 0, 1, 2, 3, 4}, {5.0, 5.0, 0.01, 0.01, 3.0, 3.0});
  for (int i = 0; i <= 5000; ++i) {
    const double si = -1.0 + 5.0 * i / 5000.0;
    EXPECT_GT(tab.at(si), 0.0);
  }
}
