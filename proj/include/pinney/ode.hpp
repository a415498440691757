#pragma once

// Dormand-Prince 5(4) integrator with PI step control, continuous (dense)
// output and a threshold event on the first state component; plus the
// right-hand sides of the damped Pinney and damped linear oscillator.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pinney/error.hpp"
#include "pinney/frequency.hpp"

namespace pinney {

template <std::size_t N>
using State = std::array<double, N>;

struct Tolerance {
  double abs = 1e-10;
  double rel = 1e-10;
};

/// Default collapse threshold (length units).
inline constexpr double kDefaultCollapseThreshold = 1e-6;

/// Step floor used while a collapse event is armed. Near a collapse
/// x ~ sqrt(t* - t), so reaching x = 1e-6 under 1e-10 tolerances takes steps
/// around 1e-14.
inline constexpr double kCollapseMinStep = 1e-15;

struct IntegratorOptions {
  Tolerance tol{};
  /// When set, integration stops as soon as |y[0]| falls to this value.
  std::optional<double> collapse_threshold{};
  double min_step = 1e-12;
  double max_step = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 20'000'000;
};

enum class IntegrationStatus { Completed, CollapseDetected, StepFailure };

constexpr std::string_view to_string(IntegrationStatus s) {
  switch (s) {
    case IntegrationStatus::Completed: return "Completed";
    case IntegrationStatus::CollapseDetected: return "CollapseDetected";
    case IntegrationStatus::StepFailure: return "StepFailure";
  }
  return "Unknown";
}

struct IntegrationStats {
  std::size_t steps = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

/// Piecewise quartic continuous extension of an accepted step sequence.
template <std::size_t N>
class DenseOutput {
 public:
  struct Segment {
    double t_start;
    double h;
    std::array<State<N>, 5> coeff;
  };

  void append(const Segment& seg) { segments_.push_back(seg); }

  [[nodiscard]] bool empty() const noexcept { return segments_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return segments_.size(); }
  [[nodiscard]] double t_begin() const { return segments_.front().t_start; }
  [[nodiscard]] double t_end() const { return segments_.back().t_start + segments_.back().h; }
  [[nodiscard]] double lo() const { return std::min(t_begin(), t_end()); }
  [[nodiscard]] double hi() const { return std::max(t_begin(), t_end()); }

  [[nodiscard]] bool covers(double t) const {
    if (segments_.empty()) return false;
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo()), std::abs(hi())));
    return t >= lo() - slack && t <= hi() + slack;
  }

  [[nodiscard]] State<N> operator()(double t) const {
    require(covers(t), ErrorCode::OutOfRange,
            "t = " + std::to_string(t) + " outside dense span [" + std::to_string(lo()) + ", " +
                std::to_string(hi()) + "]");
    return evaluate(segments_[locate(t)], t);
  }

  [[nodiscard]] static State<N> evaluate(const Segment& seg, double t) {
    const double theta = (t - seg.t_start) / seg.h;
    const double theta1 = 1.0 - theta;
    const auto& r = seg.coeff;
    State<N> y{};
    for (std::size_t i = 0; i < N; ++i) {
      y[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
    }
    return y;
  }

  [[nodiscard]] std::span<const Segment> segments() const noexcept { return segments_; }

 private:
  [[nodiscard]] std::size_t locate(double t) const {
    const bool forward = segments_.front().h > 0.0;
    // First segment whose end lies at or beyond t in the direction of integration.
    auto it = std::lower_bound(segments_.begin(), segments_.end(), t, [forward](const Segment& s, double value) {
      const double end = s.t_start + s.h;
      return forward ? end < value : end > value;
    });
    if (it == segments_.end()) --it;
    return static_cast<std::size_t>(it - segments_.begin());
  }

  std::vector<Segment> segments_;
};

template <std::size_t N>
struct Solution {
  DenseOutput<N> dense;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::optional<double> t_star{};
  double t_final = 0.0;
  State<N> y_final{};
  IntegrationStats stats{};
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct Dopri5 {
  static constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
  static constexpr double a21 = 1.0 / 5.0;
  static constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  static constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  static constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                          a54 = -212.0 / 729.0;
  static constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                          a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
  static constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                          a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
  static constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                          e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
  static constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                          d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                          d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
};

template <std::size_t N>
double rms_norm(const State<N>& v, const State<N>& scale) {
  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = v[i] / scale[i];
    sum += r * r;
  }
  return std::sqrt(sum / static_cast<double>(N));
}

template <std::size_t N>
bool all_finite(const State<N>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace detail

/// Integrate y' = rhs(t, y) from t0 to t_end (either direction).
///
/// A right-hand side may throw `Error` with code DivisionByZero to signal
/// that a trial stage left its domain; the trial step is then rejected.
template <std::size_t N, class Rhs>
Solution<N> solve(Rhs&& rhs, const State<N>& y0, double t0, double t_end, const IntegratorOptions& opts = {}) {
  using T = detail::Dopri5;
  require(opts.tol.abs > 0.0 && opts.tol.rel > 0.0, ErrorCode::InvalidArgument, "tolerances must be positive");
  require(t_end != t0, ErrorCode::InvalidArgument, "empty integration interval");
  require(detail::all_finite(y0), ErrorCode::InvalidArgument, "non-finite initial state");

  Solution<N> out;
  const double dir = t_end > t0 ? 1.0 : -1.0;
  const double span = std::abs(t_end - t0);
  const double hmax = std::min(opts.max_step, span);
  const auto& tol = opts.tol;
  const double min_step = opts.collapse_threshold ? std::min(opts.min_step, kCollapseMinStep) : opts.min_step;

  auto event_value = [&](const State<N>& y) { return std::abs(y[0]) - *opts.collapse_threshold; };
  if (opts.collapse_threshold) {
    require(*opts.collapse_threshold > 0.0, ErrorCode::InvalidArgument, "collapse threshold must be positive");
    require(event_value(y0) > 0.0, ErrorCode::InvalidArgument, "initial state already below collapse threshold");
  }

  auto f = [&](double t, const State<N>& y) {
    ++out.stats.rhs_evaluations;
    return rhs(t, y);
  };

  double t = t0;
  State<N> y = y0;
  State<N> k1 = f(t, y);

  // Initial step guess (Hairer & Wanner, II.4).
  double h = 0.0;
  {
    State<N> sk{};
    for (std::size_t i = 0; i < N; ++i) sk[i] = tol.abs + tol.rel * std::abs(y[i]);
    const double dnf = detail::rms_norm(k1, sk);
    const double dny = detail::rms_norm(y, sk);
    h = (dnf <= 1e-5 || dny <= 1e-5) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, hmax);
    State<N> y1{};
    for (std::size_t i = 0; i < N; ++i) y1[i] = y[i] + dir * h * k1[i];
    double der2 = 0.0;
    try {
      const State<N> f1 = f(t + dir * h, y1);
      State<N> diff{};
      for (std::size_t i = 0; i < N; ++i) diff[i] = f1[i] - k1[i];
      der2 = detail::rms_norm(diff, sk) / h;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DivisionByZero) throw;
      der2 = 1.0 / (h * h);
    }
    const double der12 = std::max(std::abs(der2), dnf);
    const double h1 = der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 0.2);
    h = std::min({100.0 * h, h1, hmax});
    if (!(h > 0.0 && std::isfinite(h))) h = std::min(1e-6, hmax);  // overflowing norms at extreme tolerances
  }

  constexpr double safe = 0.9;
  constexpr double beta = 0.04;
  constexpr double expo1 = 0.2 - beta * 0.75;
  constexpr double fac_min = 0.2;   // step may shrink by at most 5x
  constexpr double fac_max = 10.0;  // and grow by at most 10x
  double facold = 1e-4;
  bool last_rejected = false;

  while ((t_end - t) * dir > 0.0) {
    if (out.stats.steps + out.stats.rejected >= opts.max_steps) {
      out.status = IntegrationStatus::StepFailure;
      break;
    }
    const double remaining = std::abs(t_end - t);
    if (!(h >= min_step) && !(remaining <= h)) {
      out.status = IntegrationStatus::StepFailure;
      break;
    }
    const bool final_step = h >= remaining;
    const double hs = final_step ? remaining : h;
    const double hd = dir * hs;

    State<N> k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, y1{}, ys{}, err{};
    bool stage_failed = false;
    try {
      for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + hd * T::a21 * k1[i];
      k2 = f(t + T::c2 * hd, ys);
      for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + hd * (T::a31 * k1[i] + T::a32 * k2[i]);
      k3 = f(t + T::c3 * hd, ys);
      for (std::size_t i = 0; i < N; ++i) ys[i] = y[i] + hd * (T::a41 * k1[i] + T::a42 * k2[i] + T::a43 * k3[i]);
      k4 = f(t + T::c4 * hd, ys);
      for (std::size_t i = 0; i < N; ++i)
        ys[i] = y[i] + hd * (T::a51 * k1[i] + T::a52 * k2[i] + T::a53 * k3[i] + T::a54 * k4[i]);
      k5 = f(t + T::c5 * hd, ys);
      for (std::size_t i = 0; i < N; ++i)
        ys[i] = y[i] + hd * (T::a61 * k1[i] + T::a62 * k2[i] + T::a63 * k3[i] + T::a64 * k4[i] + T::a65 * k5[i]);
      const double t_new = final_step ? t_end : t + hd;
      k6 = f(t_new, ys);
      for (std::size_t i = 0; i < N; ++i)
        y1[i] = y[i] + hd * (T::a71 * k1[i] + T::a73 * k3[i] + T::a74 * k4[i] + T::a75 * k5[i] + T::a76 * k6[i]);
      k7 = f(t_new, y1);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DivisionByZero) throw;
      stage_failed = true;
    }

    double err_norm = std::numeric_limits<double>::infinity();
    if (!stage_failed && detail::all_finite(y1) && detail::all_finite(k7)) {
      State<N> sk{};
      for (std::size_t i = 0; i < N; ++i) {
        err[i] = hd * (T::e1 * k1[i] + T::e3 * k3[i] + T::e4 * k4[i] + T::e5 * k5[i] + T::e6 * k6[i] +
                       T::e7 * k7[i]);
        sk[i] = tol.abs + tol.rel * std::max(std::abs(y[i]), std::abs(y1[i]));
      }
      err_norm = detail::rms_norm(err, sk);
    }

    if (!std::isfinite(err_norm)) {
      ++out.stats.rejected;
      h = hs * 0.1;
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(err_norm, expo1);
    if (err_norm > 1.0) {
      ++out.stats.rejected;
      h = hs / std::min(1.0 / fac_min, fac11 / safe);
      last_rejected = true;
      continue;
    }

    // Accepted: PI controller proposal for the next step.
    double fac = fac11 / std::pow(facold, beta);
    fac = std::clamp(fac / safe, 1.0 / fac_max, 1.0 / fac_min);
    double h_new = std::min(hs / fac, hmax);
    if (last_rejected) h_new = std::min(h_new, hs);
    facold = std::max(err_norm, 1e-4);
    last_rejected = false;

    typename DenseOutput<N>::Segment seg{t, hd, {}};
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = hd * k1[i] - ydiff;
      seg.coeff[0][i] = y[i];
      seg.coeff[1][i] = ydiff;
      seg.coeff[2][i] = bspl;
      seg.coeff[3][i] = ydiff - hd * k7[i] - bspl;
      seg.coeff[4][i] = hd * (T::d1 * k1[i] + T::d3 * k3[i] + T::d4 * k4[i] + T::d5 * k5[i] + T::d6 * k6[i] +
                              T::d7 * k7[i]);
    }
    out.dense.append(seg);
    ++out.stats.steps;

    const double t_new = final_step ? t_end : t + hd;

    if (opts.collapse_threshold && event_value(y1) <= 0.0) {
      // Bisection on the continuous extension; keep the bracket end where the
      // event function is already non-positive.
      double lo = t;
      double hi = t_new;
      while (std::abs(hi - lo) > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (event_value(DenseOutput<N>::evaluate(seg, mid)) <= 0.0) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      out.status = IntegrationStatus::CollapseDetected;
      out.t_star = hi;
      // Rebuild the final segment so the dense span ends exactly at t_star.
      auto segs = std::vector<typename DenseOutput<N>::Segment>(out.dense.segments().begin(),
                                                                  out.dense.segments().end());
      DenseOutput<N> trimmed;
      for (std::size_t s = 0; s + 1 < segs.size(); ++s) trimmed.append(segs[s]);
      auto final_seg = segs.back();
      const double ratio = (hi - final_seg.t_start) / final_seg.h;
      // Reparametrise theta' = theta / ratio on the shortened interval.
      std::array<State<N>, 5> c{};
      // Expand the quartic in monomials of theta, rescale, then convert back.
      for (std::size_t i = 0; i < N; ++i) {
        const auto& r = final_seg.coeff;
        // y(theta) = r0 + th*(r1 + (1-th)*(r2 + th*(r3 + (1-th)*r4)))
        // monomial coefficients m0..m4
        const double r0 = r[0][i], r1 = r[1][i], r2 = r[2][i], r3 = r[3][i], r4 = r[4][i];
        // inner = r3 + (1-th) r4 = (r3 + r4) - r4 th
        // p2 = r2 + th*inner = r2 + (r3+r4) th - r4 th^2
        // p1 = r1 + (1-th)*p2
        //    = r1 + r2 + (r3 + r4 - r2) th + (-r4 - r3 - r4) th^2 + r4 th^3
        const double m0 = r0;
        const double m1 = r1 + r2;
        const double m2 = r3 + r4 - r2;
        const double m3 = -r3 - 2.0 * r4;
        const double m4 = r4;
        // y = m0 + m1 th + m2 th^2 + m3 th^3 + m4 th^4, th = ratio * th'
        const double n0 = m0, n1 = m1 * ratio, n2 = m2 * ratio * ratio, n3 = m3 * std::pow(ratio, 3),
                     n4 = m4 * std::pow(ratio, 4);
        // Store in the same nested form: choose r4' = n4, r3' from m3 = -r3 - 2 r4,
        // r2' from m2 = r3 + r4 - r2, r1' from m1 = r1 + r2.
        const double q4 = n4;
        const double q3 = -n3 - 2.0 * q4;
        const double q2 = q3 + q4 - n2;
        const double q1 = n1 - q2;
        c[0][i] = n0;
        c[1][i] = q1;
        c[2][i] = q2;
        c[3][i] = q3;
        c[4][i] = q4;
      }
      final_seg.h = hi - final_seg.t_start;
      final_seg.coeff = c;
      trimmed.append(final_seg);
      out.dense = std::move(trimmed);
      out.t_final = hi;
      out.y_final = out.dense(hi);
      return out;
    }

    t = t_new;
    y = y1;
    k1 = k7;  // first-same-as-last
    h = h_new;
  }

  out.t_final = t;
  out.y_final = y;
  return out;
}

// ---------------------------------------------------------------------------
// Physical right-hand sides.

/// Parameters of  x'' + 2 eps x' + Omega(eps t)^2 x = k / x^3.
struct PinneyParams {
  double eps = 0.0;
  double k = 1.0;
  FrequencyProfile profile = FrequencyProfile::constant(1.0);

  void validate() const {
    require(std::isfinite(eps) && eps >= 0.0, ErrorCode::InvalidArgument, "eps must be non-negative");
    require(std::isfinite(k), ErrorCode::InvalidArgument, "k must be finite");
  }
};

/// |x| below this is treated as the singular point of k/x^3.
inline constexpr double kSingularFloor = 1e-12;

inline State<2> rhs_damped_pinney(const PinneyParams& p, double t, const State<2>& y) {
  const double x = y[0];
  if (!(std::abs(x) >= kSingularFloor)) {
    fail(ErrorCode::DivisionByZero, "x = " + std::to_string(x) + " at t = " + std::to_string(t));
  }
  const double w = omega_eval(p.profile, p.eps, t);
  return {y[1], -2.0 * p.eps * y[1] - w * w * x + p.k / (x * x * x)};
}

inline State<2> rhs_classical(const PinneyParams& p, double t, const State<2>& y) {
  const double w = omega_eval(p.profile, p.eps, t);
  return {y[1], -2.0 * p.eps * y[1] - w * w * y[0]};
}

/// Callable adaptors for `solve` / `integrate`.
inline auto damped_pinney_field(PinneyParams p) {
  return [p = std::move(p)](double t, const State<2>& y) { return rhs_damped_pinney(p, t, y); };
}
inline auto classical_field(PinneyParams p) {
  return [p = std::move(p)](double t, const State<2>& y) { return rhs_classical(p, t, y); };
}

// ---------------------------------------------------------------------------
// Sampled trajectories.

struct TrajectorySample {
  double t;
  double x;
  double v;
};

struct Trajectory {
  std::vector<TrajectorySample> samples;
  IntegrationStatus status = IntegrationStatus::Completed;
  std::optional<double> t_star{};
  IntegrationStats stats{};
};

/// n points spaced uniformly on [t0, t1], both ends included.
inline std::vector<double> uniform_times(double t0, double t1, std::size_t n) {
  require(n >= 2, ErrorCode::InvalidArgument, "need at least two sample times");
  std::vector<double> out(n);
  const double dt = (t1 - t0) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = t0 + dt * static_cast<double>(i);
  out.back() = t1;
  return out;
}

/// Integrate a planar system forward and sample it at `sample_times`
/// (strictly increasing, inside [t0, t_end]). On collapse the samples stop
/// at the last requested time before t_star and a final sample at t_star is
/// appended.
template <class Rhs>
Trajectory integrate(Rhs&& rhs, const State<2>& y0, double t0, double t_end, std::span<const double> sample_times,
                     const IntegratorOptions& opts = {}) {
  require(t_end > t0, ErrorCode::InvalidArgument, "integrate needs t_end > t0");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    require(sample_times[i] >= t0 && sample_times[i] <= t_end, ErrorCode::OutOfRange,
            "sample time outside integration span");
    if (i > 0) {
      require(sample_times[i] > sample_times[i - 1], ErrorCode::InvalidArgument,
              "sample times must be strictly increasing");
    }
  }
  auto sol = solve<2>(std::forward<Rhs>(rhs), y0, t0, t_end, opts);

  Trajectory traj;
  traj.status = sol.status;
  traj.t_star = sol.t_star;
  traj.stats = sol.stats;
  const double reached = sol.t_final;
  for (double ts : sample_times) {
    if (sol.status == IntegrationStatus::Completed) {
      const auto y = sol.dense(ts);
      traj.samples.push_back({ts, y[0], y[1]});
    } else if (ts < reached) {
      const auto y = sol.dense(ts);
      traj.samples.push_back({ts, y[0], y[1]});
    }
  }
  if (sol.status == IntegrationStatus::CollapseDetected) {
    if (traj.samples.empty() || traj.samples.back().t < reached) {
      traj.samples.push_back({reached, sol.y_final[0], sol.y_final[1]});
    }
  }
  return traj;
}

}  // namespace pinney
