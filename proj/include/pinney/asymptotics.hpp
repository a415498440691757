#pragma once

// Zeroth-order two-timing (Kuzmak-Luke) solution of the damped Pinney
// equation
//   x'' + 2 eps x' + Omega(eps t)^2 x = k / x^3,      k > 0,
// with slow time s = eps t and Omega0 = Omega(0):
//
//   x0 = Omega(s)^(-1/2) [ sqrt(k) + P/2 + M cos(2 Phi(t) + phi) ]^(1/2)
//   P  = Omega0 A0^2 e^(-2s)
//   M  = sqrt(Omega0) A0 e^(-s) (sqrt(k) + P/4)^(1/2)
//   Phi(t) = int_{t0}^{t} Omega(eps t') dt'
//
// The squared amplitude A^2 = M / Omega(s) and the adiabatic energy
// E0 = Omega(s) (P/2 + sqrt(k)) follow from the same two slow factors.

#include <cmath>
#include <numbers>
#include <string>

#include "pinney/error.hpp"
#include "pinney/exact.hpp"
#include "pinney/frequency.hpp"
#include "pinney/ode.hpp"

namespace pinney {

struct AsymptoticSolution {
  PinneyParams params;
  double A0 = 1.0;
  double t0 = 0.0;
  double phi = 0.0;

  void validate() const {
    params.validate();
    require(params.k > 0.0, ErrorCode::InvalidArgument,
            "the zeroth-order solution needs k > 0, got k = " + std::to_string(params.k));
    require(std::isfinite(A0) && A0 >= 0.0, ErrorCode::InvalidArgument, "A0 must be non-negative");
    require(std::isfinite(t0) && std::isfinite(phi), ErrorCode::InvalidArgument, "t0 and phi must be finite");
  }
};

namespace detail {

struct SlowFactors {
  double omega;       // Omega(eps t)
  double omega_rate;  // d Omega / dt
  double P;           // Omega0 A0^2 e^{-2 eps t}
  double dP;          // dP/dt
  double M;           // modulation amplitude of the bracket
  double dM;          // dM/dt
};

inline SlowFactors slow_factors(const AsymptoticSolution& sol, double t, bool damped) {
  const auto& p = sol.params;
  const double omega0 = omega_eval(p.profile, p.eps, 0.0);
  const double omega = omega_eval(p.profile, p.eps, t);
  const double rate = omega_rate(p.profile, p.eps, t);
  const double sqrt_k = std::sqrt(p.k);
  const double decay = damped ? std::exp(-p.eps * t) : 1.0;
  const double eps_eff = damped ? p.eps : 0.0;

  const double P = omega0 * sol.A0 * sol.A0 * decay * decay;
  const double dP = -2.0 * eps_eff * P;
  const double R = sqrt_k + 0.25 * P;
  const double M = std::sqrt(omega0) * sol.A0 * decay * std::sqrt(R);
  // d/dt log M = -eps + (dR/dt) / (2R),  dR/dt = dP/4.
  const double dM = M * (-eps_eff + 0.125 * dP / R);
  return {omega, rate, P, dP, M, dM};
}

inline PhasePoint evaluate_zeroth_order(const AsymptoticSolution& sol, double t, bool damped) {
  sol.validate();
  const auto f = slow_factors(sol, t, damped);
  const double theta = 2.0 * phase_integral(sol.params.profile, sol.params.eps, sol.t0, t) + sol.phi;
  const double c = std::cos(theta), s = std::sin(theta);
  const double bracket = std::sqrt(sol.params.k) + 0.5 * f.P + f.M * c;
  require(bracket > 0.0, ErrorCode::NegativeRadicand,
          "zeroth-order bracket " + std::to_string(bracket) + " at t = " + std::to_string(t));
  const double dbracket = 0.5 * f.dP + f.dM * c - 2.0 * f.omega * f.M * s;
  const double x = std::sqrt(bracket / f.omega);
  const double v = x * (0.5 * dbracket / bracket - 0.5 * f.omega_rate / f.omega);
  return {x, v};
}

}  // namespace detail

/// A^2(eps t).
inline double amplitude_squared(const AsymptoticSolution& sol, double t) {
  sol.validate();
  const auto f = detail::slow_factors(sol, t, true);
  return f.M / f.omega;
}

/// x0(t) and its exact time derivative.
inline PhasePoint eval_x0(const AsymptoticSolution& sol, double t) {
  return detail::evaluate_zeroth_order(sol, t, true);
}

/// The undamped variant: every e^{-eps t} amplitude factor replaced by 1,
/// the frequency still slowly varying.
inline PhasePoint eval_x0_undamped(const AsymptoticSolution& sol, double t) {
  return detail::evaluate_zeroth_order(sol, t, false);
}

/// E0(t) = Omega(eps t) (Omega0 A0^2 e^{-2 eps t} / 2 + sqrt(k)).
inline double adiabatic_energy(const AsymptoticSolution& sol, double t) {
  sol.validate();
  const auto f = detail::slow_factors(sol, t, true);
  return f.omega * (0.5 * f.P + std::sqrt(sol.params.k));
}

/// Fixed point k^{1/4} / Omega(eps t)^{1/2} the orbit spirals toward.
inline double fixed_point(const PinneyParams& params, double t) {
  return std::pow(params.k, 0.25) / std::sqrt(omega_eval(params.profile, params.eps, t));
}

/// Envelope of |x0(t) - fixed point|: the larger deviation of the two fast-phase
/// extremes cos(theta) = +1 and cos(theta) = -1, evaluated with the slow factors
/// frozen at t.
inline double deviation_envelope(const AsymptoticSolution& sol, double t) {
  sol.validate();
  const auto f = detail::slow_factors(sol, t, true);
  const double base = std::sqrt(sol.params.k) + 0.5 * f.P;
  const double fp = fixed_point(sol.params, t);
  const double upper = std::sqrt((base + f.M) / f.omega) - fp;
  const double lower = fp - std::sqrt(std::max(0.0, base - f.M) / f.omega);
  return std::max(upper, lower);
}

struct OrbitFit {
  double A0;
  double t0;
  double phi;
};

/// Invert eval_x0 at t = 0 (t0 held at 0): find (A0, phi) whose zeroth-order
/// orbit passes through (x_init, v_init).
///
/// The energy relation E(0) = Omega0 (Omega0 A0^2 / 2 + sqrt k) fixes A0 in
/// closed form (exactly so when eps = 0); the x-equation then fixes cos(phi)
/// and the velocity fixes the sign of sin(phi). For eps > 0 the closed form
/// is refined by Newton's method on the exact t = 0 relations so that
/// fit_A0_t0 inverts eval_x0.
inline OrbitFit fit_A0_t0(const PinneyParams& params, double x_init, double v_init) {
  params.validate();
  require(params.k > 0.0, ErrorCode::InvalidArgument, "fit needs k > 0");
  require(x_init > 0.0, ErrorCode::InvalidArgument, "fit needs x_init > 0");
  require(std::isfinite(v_init), ErrorCode::InvalidArgument, "fit needs a finite v_init");

  const double eps = params.eps;
  const double omega0 = omega_eval(params.profile, eps, 0.0);
  const double rate0 = omega_rate(params.profile, eps, 0.0);
  const double sqrt_k = std::sqrt(params.k);

  // Target bracket B and its derivative from x = (B/Omega)^{1/2}.
  const double B = omega0 * x_init * x_init;
  const double dB = 2.0 * B * (v_init / x_init + 0.5 * rate0 / omega0);

  // With P = Omega0 A0^2, at t = 0:
  //   M cos(phi) = B - sqrt k - P/2                                  =: c(P)
  //   M sin(phi) = (-eps P - eps (1 + P/(4R)) c(P) - dB) / (2 Omega0)  =: s(P)
  //   M^2 = P (sqrt k + P/4) = P R
  auto components = [&](double P) {
    const double R = sqrt_k + 0.25 * P;
    const double c = B - sqrt_k - 0.5 * P;
    const double s = (-eps * P - eps * (1.0 + 0.25 * P / R) * c - dB) / (2.0 * omega0);
    return std::array<double, 3>{c, s, P * R};
  };
  auto residual = [&](double P) {
    const auto [c, s, m2] = components(P);
    return c * c + s * s - m2;
  };

  // 2 (E/Omega0 - sqrt k) with E = v^2/2 + Omega0^2 x^2/2 + k/(2 x^2), rearranged
  // so that nothing cancels near the fixed point B = sqrt k.
  const double dev = B - sqrt_k;
  double P = v_init * v_init / omega0 + dev * dev / B;

  {
    const double R = sqrt_k + 0.25 * P;
    const double M = std::sqrt(P * R);
    if (M > 0.0) {
      const double implied_cos = (B - sqrt_k - 0.5 * P) / M;
      if (std::abs(implied_cos) > 1.0 + 1e-9) {
        fail(ErrorCode::OffOrbit, "implied cos(phi) = " + std::to_string(implied_cos));
      }
    }
  }

  if (eps > 0.0 && P > 0.0) {
    for (int iter = 0; iter < 50; ++iter) {
      const double g = residual(P);
      const double h = 1e-7 * std::max(1.0, P);
      const double dg = (residual(P + h) - residual(P - h)) / (2.0 * h);
      if (dg == 0.0 || !std::isfinite(dg)) break;
      const double step = g / dg;
      P = std::max(0.0, P - step);
      if (std::abs(step) <= 1e-15 * std::max(1.0, P)) break;
    }
    if (std::abs(residual(P)) > 1e-8 * std::max(1.0, B * B)) {
      fail(ErrorCode::OffOrbit, "no zeroth-order orbit through the initial data");
    }
  }

  const double A0 = std::sqrt(P / omega0);
  if (P <= 1e-16) return {0.0, 0.0, 0.0};  // on the fixed point to within A0 < 1e-8
  const auto [c, s, m2] = components(P);
  double phi = std::atan2(s, c);
  if (phi < 0.0) phi += 2.0 * std::numbers::pi;
  return {A0, 0.0, phi};
}

}  // namespace pinney
