#pragma once

// Asymptotic-versus-numeric comparison: error norms, envelope midlines and
// eps-convergence studies.

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinney/asymptotics.hpp"
#include "pinney/error.hpp"
#include "pinney/ode.hpp"

namespace pinney {

struct MidlinePoint {
  double t;
  double value;
};

struct PairedSample {
  double t;
  double x_numeric;
  double x_asymptotic;
  double abs_err;
};

struct ComparisonReport {
  double max_abs_err = 0.0;
  double rms_err = 0.0;
  std::size_t sample_count = 0;
  double eps = 0.0;
  std::vector<MidlinePoint> envelope_midline;
  std::optional<double> convergence_ratio;
  std::vector<PairedSample> pairs;
};

/// Options used for the numeric side of every comparison.
inline IntegratorOptions comparison_options() {
  IntegratorOptions o;
  o.tol = {1e-12, 1e-12};
  return o;
}

namespace detail {

inline void require_completed(const Trajectory& traj) {
  if (traj.status == IntegrationStatus::StepFailure) fail(ErrorCode::StepFailure, "numeric run failed to advance");
  if (traj.status == IntegrationStatus::CollapseDetected) {
    fail(ErrorCode::UnexpectedCollapse, "numeric run collapsed at t = " + std::to_string(*traj.t_star));
  }
}

}  // namespace detail

/// Error norms between two series sampled at the same times.
inline ComparisonReport compare_series(std::span<const TrajectorySample> numeric,
                                       std::span<const TrajectorySample> asymptotic, double eps) {
  require(numeric.size() == asymptotic.size() && !numeric.empty(), ErrorCode::InvalidArgument,
          "series must be non-empty and of equal length");
  ComparisonReport r;
  r.eps = eps;
  r.sample_count = numeric.size();
  double sq = 0.0;
  for (std::size_t i = 0; i < numeric.size(); ++i) {
    require(numeric[i].t == asymptotic[i].t, ErrorCode::InvalidArgument, "series sampled at different times");
    const double e = std::abs(numeric[i].x - asymptotic[i].x);
    r.max_abs_err = std::max(r.max_abs_err, e);
    sq += e * e;
    r.pairs.push_back({numeric[i].t, numeric[i].x, asymptotic[i].x, e});
  }
  r.rms_err = std::sqrt(sq / static_cast<double>(numeric.size()));
  return r;
}

inline std::vector<TrajectorySample> sample_asymptotic(const AsymptoticSolution& sol, std::span<const double> times) {
  std::vector<TrajectorySample> out;
  out.reserve(times.size());
  for (double t : times) {
    const auto p = eval_x0(sol, t);
    out.push_back({t, p.x, p.v});
  }
  return out;
}

/// Numeric run of the damped equation started on the asymptotic solution at t = 0.
inline Trajectory numeric_from_asymptotic(const AsymptoticSolution& sol, std::span<const double> times, double t_end) {
  const auto start = eval_x0(sol, 0.0);
  auto opts = comparison_options();
  opts.collapse_threshold = kDefaultCollapseThreshold;
  return integrate(damped_pinney_field(sol.params), {start.x, start.v}, 0.0, t_end, times, opts);
}

/// Midline (max + min) / 2 of each adjacent pair of extrema, each extremum
/// refined by the parabola through its sample and two neighbours.
inline std::vector<MidlinePoint> envelope_midline(std::span<const TrajectorySample> s) {
  struct Extremum {
    double t, x;
  };
  std::vector<Extremum> ext;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double a = s[i - 1].x, b = s[i].x, c = s[i + 1].x;
    const bool is_max = b > a && b >= c;
    const bool is_min = b < a && b <= c;
    if (!is_max && !is_min) continue;
    const double t0 = s[i - 1].t, t1 = s[i].t, t2 = s[i + 1].t;
    const double d01 = (b - a) / (t1 - t0), d12 = (c - b) / (t2 - t1);
    const double curv = (d12 - d01) / (t2 - t0);
    if (curv == 0.0) {
      ext.push_back({t1, b});
      continue;
    }
    // x(t) = b + d (t - t1) + curv (t - t1)^2 with d the centred slope at t1.
    const double d = d01 + curv * (t1 - t0);
    const double dt = std::clamp(-d / (2.0 * curv), t0 - t1, t2 - t1);
    ext.push_back({t1 + dt, b + d * dt + curv * dt * dt});
  }
  require(ext.size() >= 3, ErrorCode::TooFewExtrema,
          "envelope needs at least 3 extrema, found " + std::to_string(ext.size()));
  std::vector<MidlinePoint> out;
  out.reserve(ext.size() - 1);
  for (std::size_t i = 0; i + 1 < ext.size(); ++i) {
    out.push_back({0.5 * (ext[i].t + ext[i + 1].t), 0.5 * (ext[i].x + ext[i + 1].x)});
  }
  return out;
}

inline std::vector<MidlinePoint> envelope_midline(const Trajectory& traj) { return envelope_midline(traj.samples); }

/// Numeric and asymptotic x on n_samples uniform times over [0, t_end].
inline ComparisonReport compare(const AsymptoticSolution& sol, double t_end, std::size_t n_samples) {
  sol.validate();
  require(t_end > 0.0, ErrorCode::InvalidArgument, "t_end must be positive");
  const auto times = uniform_times(0.0, t_end, n_samples);
  const auto numeric = numeric_from_asymptotic(sol, times, t_end);
  detail::require_completed(numeric);
  auto r = compare_series(numeric.samples, sample_asymptotic(sol, times), sol.params.eps);
  try {
    r.envelope_midline = envelope_midline(numeric);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::TooFewExtrema) throw;
  }
  return r;
}

inline ComparisonReport compare(const PinneyParams& params, const AsymptoticSolution& sol, double t_end,
                                std::size_t n_samples) {
  AsymptoticSolution s = sol;
  s.params = params;
  return compare(s, t_end, n_samples);
}

/// Half peak-to-peak of x0 at t = 0 with the slow factors frozen.
inline double initial_half_amplitude(const AsymptoticSolution& sol) {
  const auto f = detail::slow_factors(sol, 0.0, sol.params.eps > 0.0);
  const double base = std::sqrt(sol.params.k) + 0.5 * f.P;
  return 0.5 * (std::sqrt(base + f.M) - std::sqrt(std::max(base - f.M, 0.0))) / std::sqrt(f.omega);
}

struct ConvergencePoint {
  double eps;
  double max_abs_err;
};

struct ConvergenceStudy {
  std::vector<ConvergencePoint> points;
  std::optional<double> fitted_order;
  double breakdown_threshold = 0.0;
  std::optional<double> breakdown_eps;
};

/// Fraction of the initial half-amplitude beyond which the truncation is
/// considered to have broken down.
inline constexpr double kBreakdownFraction = 0.1;

/// compare() per eps (run concurrently), the least-squares slope of
/// log(err) against log(eps), and the smallest eps whose error exceeds the
/// breakdown threshold.
inline ConvergenceStudy convergence_study(const AsymptoticSolution& base, std::span<const double> eps_list, double t_end,
                                          std::size_t n_samples = 2000) {
  require(!eps_list.empty(), ErrorCode::InvalidArgument, "eps list is empty");
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    require(eps_list[i] > 0.0, ErrorCode::InvalidArgument, "eps values must be positive");
    if (i > 0) require(eps_list[i] > eps_list[i - 1], ErrorCode::InvalidArgument, "eps values must be increasing");
  }
  std::vector<std::future<double>> jobs;
  for (double eps : eps_list) {
    AsymptoticSolution s = base;
    s.params.eps = eps;
    jobs.push_back(std::async(std::launch::async, [s, t_end, n_samples] { return compare(s, t_end, n_samples).max_abs_err; }));
  }
  ConvergenceStudy out;
  for (std::size_t i = 0; i < eps_list.size(); ++i) out.points.push_back({eps_list[i], jobs[i].get()});

  if (out.points.size() >= 2) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double n = static_cast<double>(out.points.size());
    for (const auto& p : out.points) {
      const double lx = std::log(p.eps), ly = std::log(p.max_abs_err);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
    }
    out.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  out.breakdown_threshold = kBreakdownFraction * initial_half_amplitude(base);
  for (const auto& p : out.points) {
    if (p.max_abs_err > out.breakdown_threshold) {
      out.breakdown_eps = p.eps;
      break;
    }
  }
  return out;
}

}  // namespace pinney
