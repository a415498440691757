#pragma once

// Numerical checks of the point transformations of the damped Pinney
// equation. Each check maps a sampled trajectory and reports the largest
// residual of the target equation, with derivatives taken by 5-point
// stencils on the (generally nonuniform) new-time grid.
//
//   quasi-invariance: x = rho Q(T),  T' = e^{-2 eps t} / rho^2,
//     rho'' + 2 eps rho' + Omega^2 rho = W^2 e^{-4 eps t} / rho^3,
//     Q_TT + W^2 Q = k e^{4 eps t} / Q^3
//   Emden-Fowler (W = 0):  Q_TT = mu(T) / Q^3,  mu = k e^{4 eps t}
//   Abel:  v dv/dx = -2 eps v - Omega^2 x + k / x^3
//   time-dependent mass:  x'' - (m'/m) x' + Omega^2 x = k m^2 / x^3,
//     Q = x / (sqrt(m) rho),  T = int dt / rho^2,
//     Q_TT + rho^3 [rho'' + (Omega^2 + m''/(2m) - 3 m'^2/(4 m^2)) rho] Q = k / Q^3

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pinney/error.hpp"
#include "pinney/frequency.hpp"
#include "pinney/ode.hpp"
#include "pinney/stencil.hpp"

namespace pinney {

class QuasiInvarianceMap {
 public:
  QuasiInvarianceMap(PinneyParams params, double W, DenseOutput<3> state)
      : params_(std::move(params)), W_(W), state_(std::move(state)) {}

  [[nodiscard]] const PinneyParams& params() const noexcept { return params_; }
  [[nodiscard]] double W() const noexcept { return W_; }
  [[nodiscard]] double t_begin() const { return state_.t_begin(); }
  [[nodiscard]] double t_end() const { return state_.t_end(); }
  [[nodiscard]] bool covers(double t) const { return state_.covers(t); }

  [[nodiscard]] double rho(double t) const { return state_(t)[0]; }
  [[nodiscard]] double rho_dot(double t) const { return state_(t)[1]; }
  [[nodiscard]] double T(double t) const { return state_(t)[2]; }

  /// Residual of the auxiliary equation, using the exact right-hand side for rho''.
  [[nodiscard]] double auxiliary_residual(double t, double rho_ddot) const {
    const auto y = state_(t);
    const double w = omega_eval(params_.profile, params_.eps, t);
    const double rho = y[0];
    return rho_ddot + 2.0 * params_.eps * y[1] + w * w * rho -
           W_ * W_ * std::exp(-4.0 * params_.eps * t) / (rho * rho * rho);
  }

 private:
  PinneyParams params_;
  double W_;
  DenseOutput<3> state_;
};

/// Co-integrate rho and T from t = 0 (T(0) = 0) to t_end. Throws
/// RhoZeroCrossing if |rho| falls to `rho_floor` before t_end.
inline QuasiInvarianceMap build_quasi_invariance(const PinneyParams& params, State<2> rho0, double W, double t_end,
                                                 Tolerance tol = {1e-13, 1e-13},
                                                 double rho_floor = kDefaultCollapseThreshold) {
  params.validate();
  require(std::isfinite(W) && W >= 0.0, ErrorCode::InvalidArgument, "W must be non-negative");
  require(t_end > 0.0, ErrorCode::InvalidArgument, "t_end must be positive");
  if (!(std::abs(rho0[0]) > rho_floor)) fail(ErrorCode::RhoZeroCrossing, "rho(0) = 0 makes the map singular");

  const double eps = params.eps;
  auto rhs = [&](double t, const State<3>& y) {
    const double rho = y[0];
    if (!(std::abs(rho) >= kSingularFloor)) fail(ErrorCode::DivisionByZero, "rho = 0");
    const double w = omega_eval(params.profile, eps, t);
    const double e2 = std::exp(-2.0 * eps * t);
    return State<3>{y[1], -2.0 * eps * y[1] - w * w * rho + W * W * e2 * e2 / (rho * rho * rho),
                    e2 / (rho * rho)};
  };
  IntegratorOptions opts;
  opts.tol = tol;
  opts.collapse_threshold = rho_floor;
  auto run = solve<3>(rhs, {rho0[0], rho0[1], 0.0}, 0.0, t_end, opts);
  if (run.status == IntegrationStatus::CollapseDetected) {
    fail(ErrorCode::RhoZeroCrossing, "rho vanishes at t = " + std::to_string(*run.t_star) + " before t_end = " +
                                         std::to_string(t_end));
  }
  require(run.status == IntegrationStatus::Completed, ErrorCode::RhoZeroCrossing,
          "auxiliary integration failed near t = " + std::to_string(run.t_final));
  return {params, W, std::move(run.dense)};
}

namespace detail {

inline void require_stencil_grid(const Trajectory& traj) {
  require(traj.samples.size() >= 5, ErrorCode::InvalidArgument, "residual checks need at least 5 samples");
  for (std::size_t i = 1; i < traj.samples.size(); ++i) {
    require(traj.samples[i].t > traj.samples[i - 1].t, ErrorCode::InvalidArgument,
            "trajectory times must be strictly increasing");
  }
}

/// max over interior points of |Q_TT + stiffness_i Q_i - forcing_i / Q_i^3|.
inline double max_second_order_residual(const std::vector<double>& T, const std::vector<double>& Q,
                                        const std::vector<double>& stiffness, const std::vector<double>& forcing) {
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < T.size(); ++i) {
    const double qtt = centered5(T, Q, i, 2);
    const double q = Q[i];
    worst = std::max(worst, std::abs(qtt + stiffness[i] * q - forcing[i] / (q * q * q)));
  }
  return worst;
}

}  // namespace detail

/// Max |Q_TT + W^2 Q - k e^{4 eps t} / Q^3| over interior samples of a
/// damped Pinney trajectory mapped by `map`.
inline double transform_residual_e3(const QuasiInvarianceMap& map, const Trajectory& traj) {
  detail::require_stencil_grid(traj);
  const auto n = traj.samples.size();
  std::vector<double> T(n), Q(n), stiffness(n, map.W() * map.W()), forcing(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = traj.samples[i];
    require(map.covers(s.t), ErrorCode::OutOfRange, "trajectory sample outside the map span");
    const double rho = map.rho(s.t);
    if (!(std::abs(rho) >= kSingularFloor)) fail(ErrorCode::RhoZeroCrossing, "rho = 0 on the trajectory");
    T[i] = map.T(s.t);
    Q[i] = s.x / rho;
    forcing[i] = map.params().k * std::exp(4.0 * map.params().eps * s.t);
  }
  return detail::max_second_order_residual(T, Q, stiffness, forcing);
}

struct EmdenFowlerPoint {
  double T;
  double mu;
};

/// mu = k e^{4 eps t} at new time T(t), for a W = 0 map.
inline EmdenFowlerPoint emden_fowler_mu(const QuasiInvarianceMap& map, double t) {
  require(map.W() == 0.0, ErrorCode::InvalidArgument, "the Emden-Fowler form needs W = 0");
  return {map.T(t), map.params().k * std::exp(4.0 * map.params().eps * t)};
}

/// Closed form of mu(T) for constant Omega0 > eps and the particular solution
/// rho = e^{-eps t} cos(nu t), nu = sqrt(Omega0^2 - eps^2), where T = tan(nu t) / nu.
inline double emden_fowler_mu_closed_form(double k, double eps, double omega0, double T) {
  require(omega0 > eps, ErrorCode::InvalidArgument, "closed form needs Omega0 > eps");
  const double nu = std::sqrt(omega0 * omega0 - eps * eps);
  return k * std::exp(4.0 * eps / nu * std::atan(nu * T));
}

struct SampleRange {
  std::size_t first;
  std::size_t last;  // inclusive
};

/// First maximal run of samples with strictly monotone x holding at least 5 samples.
inline SampleRange first_monotone_arc(const Trajectory& traj) {
  const auto& s = traj.samples;
  std::size_t start = 0;
  while (start + 1 < s.size()) {
    const double dir = s[start + 1].x - s[start].x;
    if (dir == 0.0) {
      ++start;
      continue;
    }
    std::size_t end = start + 1;
    while (end + 1 < s.size() && (s[end + 1].x - s[end].x) * dir > 0.0) ++end;
    if (end - start + 1 >= 5) return {start, end};
    start = end;
  }
  fail(ErrorCode::NonMonotoneArc, "trajectory has no monotone arc of 5 or more samples");
}

/// Max |v dv/dx + 2 eps v + Omega^2 x - k / x^3| over the interior of the first
/// monotone arc. dv/dx is taken parametrically, (dv/dt) / (dx/dt), with both
/// derivatives from 5-point stencils in t: v(x) has a square-root branch at
/// the turning points that bound the arc, so stencils in x lose accuracy
/// there while v(t) and x(t) stay smooth.
inline double abel_residual(const PinneyParams& params, const Trajectory& traj) {
  params.validate();
  require(params.profile.kind() == ProfileKind::Constant, ErrorCode::InvalidArgument,
          "the Abel reduction needs a constant frequency");
  detail::require_stencil_grid(traj);
  const auto arc = first_monotone_arc(traj);
  const double w = params.profile.omega0();
  std::vector<double> t, x, v;
  for (std::size_t i = arc.first; i <= arc.last; ++i) {
    t.push_back(traj.samples[i].t);
    x.push_back(traj.samples[i].x);
    v.push_back(traj.samples[i].v);
  }
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < x.size(); ++i) {
    const double dxdt = centered5(t, x, i, 1);
    if (dxdt == 0.0) continue;
    const double dvdx = centered5(t, v, i, 1) / dxdt;
    const double xi = x[i];
    worst = std::max(worst, std::abs(v[i] * dvdx + 2.0 * params.eps * v[i] + w * w * xi - params.k / (xi * xi * xi)));
  }
  return worst;
}

/// A function of time with its first two derivatives.
struct SmoothFunction {
  std::function<double(double)> value;
  std::function<double(double)> first;
  std::function<double(double)> second;

  static SmoothFunction constant(double c) {
    return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
  }
  /// a e^{b t}
  static SmoothFunction exponential(double a, double b) {
    return {[a, b](double t) { return a * std::exp(b * t); }, [a, b](double t) { return a * b * std::exp(b * t); },
            [a, b](double t) { return a * b * b * std::exp(b * t); }};
  }
};

/// x'' - (m'/m) x' + Omega(eps t)^2 x = k m^2 / x^3.
struct MassPinneySystem {
  double k = 1.0;
  FrequencyProfile profile = FrequencyProfile::constant(1.0);
  double eps = 0.0;
  SmoothFunction mass = SmoothFunction::constant(1.0);
};

inline State<2> rhs_mass_pinney(const MassPinneySystem& sys, double t, const State<2>& y) {
  const double x = y[0];
  if (!(std::abs(x) >= kSingularFloor)) fail(ErrorCode::DivisionByZero, "x = 0");
  const double m = sys.mass.value(t);
  if (!(m > 0.0)) fail(ErrorCode::NonPositiveMass, "m(t) = " + std::to_string(m) + " at t = " + std::to_string(t));
  const double w = omega_eval(sys.profile, sys.eps, t);
  return {y[1], sys.mass.first(t) / m * y[1] - w * w * x + sys.k * m * m / (x * x * x)};
}

inline auto mass_pinney_field(MassPinneySystem sys) {
  return [sys = std::move(sys)](double t, const State<2>& y) { return rhs_mass_pinney(sys, t, y); };
}

/// Map a trajectory of the time-dependent-mass equation to standard Pinney
/// form with gauge rho and return the max residual over interior samples.
/// T is accumulated by Gauss-Kronrod quadrature between consecutive samples.
inline double mass_pinney_to_standard(const MassPinneySystem& sys, const SmoothFunction& rho, const Trajectory& traj) {
  detail::require_stencil_grid(traj);
  const auto n = traj.samples.size();
  std::vector<double> T(n, 0.0), Q(n), stiffness(n), forcing(n, sys.k);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = traj.samples[i].t;
    const double m = sys.mass.value(t);
    if (!(m > 0.0)) fail(ErrorCode::NonPositiveMass, "m(t) = " + std::to_string(m) + " at t = " + std::to_string(t));
    const double r = rho.value(t);
    if (!(r > 0.0)) fail(ErrorCode::RhoZeroCrossing, "rho(t) = " + std::to_string(r) + " at t = " + std::to_string(t));
    const double dm = sys.mass.first(t);
    const double ddm = sys.mass.second(t);
    const double w = omega_eval(sys.profile, sys.eps, t);
    Q[i] = traj.samples[i].x / (std::sqrt(m) * r);
    stiffness[i] = r * r * r * (rho.second(t) + (w * w + ddm / (2.0 * m) - 0.75 * dm * dm / (m * m)) * r);
    if (i > 0) {
      const double t_prev = traj.samples[i - 1].t;
      T[i] = T[i - 1] + boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
                            [&](double tau) {
                              const double rr = rho.value(tau);
                              return 1.0 / (rr * rr);
                            },
                            t_prev, t, 8, 1e-14);
    }
  }
  return detail::max_second_order_residual(T, Q, stiffness, forcing);
}

}  // namespace pinney
