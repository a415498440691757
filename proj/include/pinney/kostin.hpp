#pragma once

// Gaussian wave packet of the Kostin equation for a damped, slowly driven
// harmonic oscillator. The packet
//   n(q, t) = (pi x^2)^{-1/2} exp(-((q - q_cl) / x)^2),
//   u(q, t) = (x'/x)(q - q_cl) + q_cl'
// is carried by two uncoupled ODEs with shared damping and frequency:
//   x''    + 2 eps x'    + Omega^2 x    = hbar^2 / (m^2 x^3)
//   q_cl'' + 2 eps q_cl' + Omega^2 q_cl = 0

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <span>
#include <string>
#include <thread>
#include <variant>
#include <vector>

#include "pinney/asymptotics.hpp"
#include "pinney/error.hpp"
#include "pinney/frequency.hpp"
#include "pinney/ode.hpp"

namespace pinney {

enum class KostinMode { Numeric, Asymptotic };

constexpr std::string_view to_string(KostinMode m) {
  return m == KostinMode::Numeric ? "numeric" : "asymptotic";
}

/// Width initial data in phase space.
struct WidthState {
  double x;
  double xdot;
};

/// Width initial data as zeroth-order orbit parameters.
struct WidthOrbit {
  double A0;
  double t0 = 0.0;
  double phi = 0.0;
};

struct KostinParams {
  double hbar = 1.0;
  double mass = 1.0;
  double eps = 0.1;
  FrequencyProfile profile = FrequencyProfile::constant(1.0);
  State<2> q_cl_init{1.0, 0.0};
  std::variant<WidthState, WidthOrbit> width_init = WidthOrbit{4.0, 0.0, 0.0};

  /// The width equation as a damped Pinney problem with k = hbar^2 / m^2.
  [[nodiscard]] PinneyParams pinney() const { return {eps, hbar * hbar / (mass * mass), profile}; }

  void validate() const {
    require(std::isfinite(hbar) && hbar > 0.0, ErrorCode::InvalidArgument, "hbar must be positive");
    require(std::isfinite(mass) && mass > 0.0, ErrorCode::InvalidArgument, "mass must be positive");
    require(std::isfinite(q_cl_init[0]) && std::isfinite(q_cl_init[1]), ErrorCode::InvalidArgument,
            "q_cl initial data must be finite");
    pinney().validate();
    if (const auto* w = std::get_if<WidthState>(&width_init)) {
      if (!(w->x > 0.0)) fail(ErrorCode::NonPositiveWidth, "initial width must be positive");
      require(std::isfinite(w->xdot), ErrorCode::InvalidArgument, "initial width rate must be finite");
    }
  }
};

/// Parameters of the Kostin application example: omega = Omega0 (1 + gamma sin 2 eps t)
/// with gamma = 0.7, hbar = m = Omega0 = 1, eps = 0.1, A0 = 4, t0 = 0, q_cl(0) = 1, q_cl'(0) = 0.
inline KostinParams kostin_reference_params() {
  KostinParams p;
  p.profile = FrequencyProfile::oscillating(1.0, 0.7);
  return p;
}

struct KostinSample {
  double t;
  double x;
  double xdot;
  double q_cl;
  double q_cl_dot;
};

struct KostinSeries {
  std::vector<KostinSample> samples;
  IntegrationStatus status = IntegrationStatus::Completed;
};

struct CenterSeries {
  std::vector<double> t;
  std::vector<double> q;
  std::vector<double> qdot;
  IntegrationStatus status = IntegrationStatus::Completed;
};

/// Integrate the classical centre on its own.
inline CenterSeries evolve_center(const KostinParams& params, double t_end, std::span<const double> times,
                                  const IntegratorOptions& opts = {}) {
  const auto traj = integrate(classical_field(params.pinney()), params.q_cl_init, 0.0, t_end, times, opts);
  CenterSeries out;
  out.status = traj.status;
  for (const auto& s : traj.samples) {
    out.t.push_back(s.t);
    out.q.push_back(s.x);
    out.qdot.push_back(s.v);
  }
  return out;
}

/// Width (x, x') and centre (q_cl, q_cl') at `times` inside [0, t_end]. The
/// two equations are integrated concurrently. In Asymptotic mode the width is
/// the zeroth-order solution (orbit parameters fitted when phase-space data
/// is given); in Numeric mode orbit parameters are turned into phase-space
/// data through the zeroth-order solution at t = 0.
inline KostinSeries evolve_kostin(const KostinParams& params, double t_end, KostinMode mode,
                                  std::span<const double> times, const IntegratorOptions& opts = {}) {
  params.validate();
  require(t_end > 0.0, ErrorCode::InvalidArgument, "t_end must be positive");
  require(!times.empty(), ErrorCode::InvalidArgument, "no sample times");
  const PinneyParams pinney = params.pinney();

  auto orbit = [&]() -> AsymptoticSolution {
    if (const auto* o = std::get_if<WidthOrbit>(&params.width_init)) return {pinney, o->A0, o->t0, o->phi};
    const auto& w = std::get<WidthState>(params.width_init);
    const auto fit = fit_A0_t0(pinney, w.x, w.xdot);
    return {pinney, fit.A0, fit.t0, fit.phi};
  };

  auto center_job = std::async(std::launch::async, [&] { return evolve_center(params, t_end, times, opts); });

  std::vector<std::array<double, 2>> width;
  IntegrationStatus width_status = IntegrationStatus::Completed;
  if (mode == KostinMode::Asymptotic) {
    const auto sol = orbit();
    for (double t : times) {
      const auto p = eval_x0(sol, t);
      width.push_back({p.x, p.v});
    }
  } else {
    State<2> y0{};
    if (const auto* w = std::get_if<WidthState>(&params.width_init)) {
      y0 = {w->x, w->xdot};
    } else {
      const auto p = eval_x0(orbit(), 0.0);
      y0 = {p.x, p.v};
    }
    const auto traj = integrate(damped_pinney_field(pinney), y0, 0.0, t_end, times, opts);
    width_status = traj.status;
    for (const auto& s : traj.samples) width.push_back({s.x, s.v});
  }

  const auto center = center_job.get();
  KostinSeries out;
  out.status = width_status != IntegrationStatus::Completed ? width_status : center.status;
  const std::size_t n = std::min(width.size(), center.t.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.samples.push_back({center.t[i], width[i][0], width[i][1], center.q[i], center.qdot[i]});
  }
  return out;
}

inline KostinSeries evolve_kostin(const KostinParams& params, double t_end, KostinMode mode,
                                  std::size_t n_times = 400, const IntegratorOptions& opts = {}) {
  const auto times = uniform_times(0.0, t_end, n_times);
  return evolve_kostin(params, t_end, mode, std::span<const double>(times), opts);
}

/// (pi x^2)^{-1/2} exp(-((q - q_cl)/x)^2).
inline double density(double x, double q_cl, double q) {
  if (!(x > 0.0)) fail(ErrorCode::NonPositiveWidth, "width must be positive, got " + std::to_string(x));
  const double z = (q - q_cl) / x;
  return std::exp(-z * z) / (std::sqrt(std::numbers::pi) * x);
}

/// (x'/x)(q - q_cl) + q_cl'.
inline double velocity_field(double x, double xdot, double q_cl, double q_cl_dot, double q) {
  if (!(x > 0.0)) fail(ErrorCode::NonPositiveWidth, "width must be positive, got " + std::to_string(x));
  return xdot / x * (q - q_cl) + q_cl_dot;
}

/// Trapezoid integral of the density over q_cl +- half_widths * x.
inline double slice_normalization(double x, double q_cl, double half_widths = 8.0, std::size_t points = 4001) {
  require(points >= 2, ErrorCode::InvalidArgument, "need at least two quadrature points");
  const double a = q_cl - half_widths * x;
  const double h = 2.0 * half_widths * x / static_cast<double>(points - 1);
  double sum = 0.5 * (density(x, q_cl, a) + density(x, q_cl, a + h * static_cast<double>(points - 1)));
  for (std::size_t j = 1; j + 1 < points; ++j) sum += density(x, q_cl, a + h * static_cast<double>(j));
  return sum * h;
}

/// Density and velocity on a uniform space-time grid, row-major in time.
struct QuantumFields {
  std::vector<double> q;
  std::vector<double> t;
  std::vector<double> n;
  std::vector<double> u;
  KostinSeries series;

  [[nodiscard]] std::size_t index(std::size_t it, std::size_t iq) const { return it * q.size() + iq; }
};

/// q in [min q_cl - margin * max x, max q_cl + margin * max x].
inline std::vector<double> default_q_grid(const KostinSeries& series, std::size_t points = 400, double margin = 5.0) {
  require(!series.samples.empty(), ErrorCode::InvalidArgument, "empty series");
  double qlo = series.samples.front().q_cl, qhi = qlo, xmax = 0.0;
  for (const auto& s : series.samples) {
    qlo = std::min(qlo, s.q_cl);
    qhi = std::max(qhi, s.q_cl);
    xmax = std::max(xmax, s.x);
  }
  return uniform_times(qlo - margin * xmax, qhi + margin * xmax, points);
}

/// Time slices are independent, so they are filled by concurrent workers.
inline QuantumFields build_fields(const KostinSeries& series, std::vector<double> q_grid) {
  require(!series.samples.empty() && !q_grid.empty(), ErrorCode::InvalidArgument, "empty field grid");
  QuantumFields f;
  f.q = std::move(q_grid);
  f.series = series;
  const std::size_t nt = series.samples.size(), nq = f.q.size();
  for (const auto& s : series.samples) f.t.push_back(s.t);
  f.n.assign(nt * nq, 0.0);
  f.u.assign(nt * nq, 0.0);

  auto fill = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t it = lo; it < hi; ++it) {
      const auto& s = series.samples[it];
      for (std::size_t iq = 0; iq < nq; ++iq) {
        f.n[f.index(it, iq)] = density(s.x, s.q_cl, f.q[iq]);
        f.u[f.index(it, iq)] = velocity_field(s.x, s.xdot, s.q_cl, s.q_cl_dot, f.q[iq]);
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, 8);
  const std::size_t chunk = (nt + workers - 1) / workers;
  std::vector<std::future<void>> jobs;
  for (std::size_t lo = 0; lo < nt; lo += chunk) {
    jobs.push_back(std::async(std::launch::async, fill, lo, std::min(nt, lo + chunk)));
  }
  for (auto& j : jobs) j.get();
  return f;
}

inline QuantumFields build_fields(const KostinSeries& series) { return build_fields(series, default_q_grid(series)); }

/// Max over interior grid points of |dn/dt + d(n u)/dq| with 5-point
/// centred differences, divided by max |d(n u)/dq| (left unnormalised when
/// that maximum vanishes).
inline double continuity_residual(const QuantumFields& f) {
  const std::size_t nt = f.t.size(), nq = f.q.size();
  if (nt < 5 || nq < 5) fail(ErrorCode::GridTooCoarse, "continuity check needs at least 5 points per dimension");
  auto uniform_step = [](const std::vector<double>& g, const char* what) {
    const double h = (g.back() - g.front()) / static_cast<double>(g.size() - 1);
    require(h > 0.0, ErrorCode::InvalidArgument, std::string(what) + " grid must be increasing");
    for (std::size_t i = 1; i < g.size(); ++i) {
      require(std::abs(g[i] - g[i - 1] - h) <= 1e-9 * std::abs(h) + 1e-12 * std::abs(g[i]),
              ErrorCode::InvalidArgument, std::string(what) + " grid must be uniform");
    }
    return h;
  };
  const double ht = uniform_step(f.t, "time");
  const double hq = uniform_step(f.q, "space");
  auto d1 = [](double m2, double m1, double p1, double p2, double h) { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h); };
  auto flux = [&](std::size_t it, std::size_t iq) { return f.n[f.index(it, iq)] * f.u[f.index(it, iq)]; };

  double worst = 0.0, scale = 0.0;
  for (std::size_t it = 2; it + 2 < nt; ++it) {
    for (std::size_t iq = 2; iq + 2 < nq; ++iq) {
      const double dn_dt = d1(f.n[f.index(it - 2, iq)], f.n[f.index(it - 1, iq)], f.n[f.index(it + 1, iq)],
                              f.n[f.index(it + 2, iq)], ht);
      const double dflux = d1(flux(it, iq - 2), flux(it, iq - 1), flux(it, iq + 1), flux(it, iq + 2), hq);
      worst = std::max(worst, std::abs(dn_dt + dflux));
      scale = std::max(scale, std::abs(dflux));
    }
  }
  return scale > 0.0 ? worst / scale : worst;
}

/// u at a fixed position for every sample of the series.
inline std::vector<double> velocity_at(const KostinSeries& series, double q) {
  std::vector<double> out;
  for (const auto& s : series.samples) out.push_back(velocity_field(s.x, s.xdot, s.q_cl, s.q_cl_dot, q));
  return out;
}

}  // namespace pinney
