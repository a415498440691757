#pragma once

// Exact solutions of the undamped Pinney equation x'' + w(t)^2 x = k/x^3 by
// the nonlinear superposition law
//   x^2 = c1 s1^2 + c2 s2^2 + 2 c3 s1 s2,   c1 c2 - c3^2 = k,
// where s1, s2 solve the linear oscillator with unit Wronskian.

#include <cmath>
#include <string>

#include "pinney/error.hpp"
#include "pinney/frequency.hpp"
#include "pinney/ode.hpp"

namespace pinney {

struct SuperpositionSolution {
  double k = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  /// (s1, s1', s2, s2') over the integrated span.
  DenseOutput<4> sigma;
  FrequencyProfile profile = FrequencyProfile::constant(1.0);
  double eps = 0.0;

  [[nodiscard]] double wronskian(double t) const {
    const auto s = sigma(t);
    return s[0] * s[3] - s[2] * s[1];
  }
};

/// Build the superposition solution through (x0, v0) at t0, valid on
/// [t0, t_end]. `eps` only scales the profile argument; there is no damping.
/// The basis is s1 = 1, s1' = 0, s2 = 0, s2' = 1 at t0, so matching the
/// initial data gives c1 = x0^2, c3 = x0 v0, c2 = (c3^2 + k) / c1.
inline SuperpositionSolution build_superposition(double k, const FrequencyProfile& profile, double eps, double x0,
                                                 double v0, double t0, double t_end,
                                                 Tolerance tol = {1e-12, 1e-12}) {
  require(eps >= 0.0, ErrorCode::InvalidArgument, "eps must be non-negative");
  require(std::isfinite(x0) && std::isfinite(v0) && std::isfinite(k), ErrorCode::InvalidArgument,
          "non-finite initial data");
  if (!(x0 > 0.0)) {
    fail(ErrorCode::NoRealConstants, "x0 = " + std::to_string(x0) + " admits no real superposition constants");
  }

  SuperpositionSolution sol;
  sol.k = k;
  sol.c1 = x0 * x0;
  sol.c3 = x0 * v0;
  sol.c2 = (sol.c3 * sol.c3 + k) / sol.c1;
  sol.profile = profile;
  sol.eps = eps;

  auto oscillators = [&](double t, const State<4>& y) {
    const double w = omega_eval(profile, eps, t);
    const double w2 = w * w;
    return State<4>{y[1], -w2 * y[0], y[3], -w2 * y[2]};
  };
  IntegratorOptions opts;
  opts.tol = tol;
  auto run = solve<4>(oscillators, {1.0, 0.0, 0.0, 1.0}, t0, t_end, opts);
  require(run.status == IntegrationStatus::Completed, ErrorCode::OutOfRange,
          "oscillator basis integration did not complete");
  sol.sigma = std::move(run.dense);
  return sol;
}

struct PhasePoint {
  double x;
  double v;
};

inline PhasePoint eval_superposition(const SuperpositionSolution& sol, double t) {
  const auto s = sol.sigma(t);
  const double s1 = s[0], ds1 = s[1], s2 = s[2], ds2 = s[3];
  const double q = sol.c1 * s1 * s1 + sol.c2 * s2 * s2 + 2.0 * sol.c3 * s1 * s2;
  if (!(q > 0.0)) {
    fail(ErrorCode::NegativeRadicand, "superposition quadratic form " + std::to_string(q) + " at t = " +
                                          std::to_string(t));
  }
  const double x = std::sqrt(q);
  const double v = (sol.c1 * s1 * ds1 + sol.c2 * s2 * ds2 + sol.c3 * (s1 * ds2 + s2 * ds1)) / x;
  return {x, v};
}

/// E = v^2/2 + Omega(eps t)^2 x^2/2 + k/(2 x^2).
inline double energy(const PinneyParams& params, double t, double x, double v) {
  require(x != 0.0, ErrorCode::DivisionByZero, "energy at x = 0");
  const double w = omega_eval(params.profile, params.eps, t);
  return 0.5 * v * v + 0.5 * w * w * x * x + 0.5 * params.k / (x * x);
}

}  // namespace pinney
