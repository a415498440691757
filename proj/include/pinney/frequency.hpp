#pragma once

// Slowly varying frequency profiles Omega(s), s = eps * t.

#include <algorithm>
#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "pinney/error.hpp"
#include "pinney/monotone_cubic.hpp"
#include "pinney/quadrature.hpp"

namespace pinney {

enum class ProfileKind { Constant, Decaying, Growing, Oscillating, Tabulated };

constexpr std::string_view to_string(ProfileKind kind) {
  switch (kind) {
    case ProfileKind::Constant: return "constant";
    case ProfileKind::Decaying: return "decaying";
    case ProfileKind::Growing: return "growing";
    case ProfileKind::Oscillating: return "oscillating";
    case ProfileKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

/// Immutable frequency profile. The closed-form kinds are
///   Constant    Omega = w0
///   Decaying    Omega = w0 (1 + s^2)^(-1/2)
///   Growing     Omega = w0 (1 + s^2)^(1/2)
///   Oscillating Omega = w0 (1 + gamma sin 2s)
/// and Tabulated interpolates (s, Omega) nodes with a monotone cubic.
class FrequencyProfile {
 public:
  static FrequencyProfile constant(double omega0) { return {ProfileKind::Constant, omega0, 0.0}; }
  static FrequencyProfile decaying(double omega0) { return {ProfileKind::Decaying, omega0, 0.0}; }
  static FrequencyProfile growing(double omega0) { return {ProfileKind::Growing, omega0, 0.0}; }

  static FrequencyProfile oscillating(double omega0, double gamma) {
    require(gamma > 0.0 && gamma < 1.0, ErrorCode::InvalidArgument,
            "oscillating profile needs gamma in (0, 1), got " + std::to_string(gamma));
    return {ProfileKind::Oscillating, omega0, gamma};
  }

  /// Nodes are slow-time abscissae s = eps*t; they must be strictly increasing,
  /// cover s = 0, and carry strictly positive frequencies.
  static FrequencyProfile tabulated(std::vector<double> s, std::vector<double> omega) {
    require(s.size() == omega.size(), ErrorCode::InvalidArgument, "table columns differ in length");
    require(s.size() >= 4, ErrorCode::InvalidArgument, "tabulated profile needs at least 4 nodes");
    for (std::size_t i = 0; i < s.size(); ++i) {
      require(std::isfinite(s[i]) && std::isfinite(omega[i]), ErrorCode::InvalidArgument,
              "non-finite table entry");
      require(omega[i] > 0.0, ErrorCode::NonPositiveFrequency,
              "tabulated frequency must be positive at node " + std::to_string(i));
      if (i > 0) {
        require(s[i] > s[i - 1], ErrorCode::InvalidArgument, "table abscissae must be strictly increasing");
      }
    }
    require(s.front() <= 0.0 && s.back() >= 0.0, ErrorCode::InvalidArgument,
            "tabulated profile must cover s = 0");
    FrequencyProfile p{ProfileKind::Tabulated, 1.0, 0.0};
    p.lo_ = s.front();
    p.hi_ = s.back();
    p.table_ = std::make_shared<const Table>(std::move(s), std::move(omega));
    p.omega0_ = p.at(0.0);
    return p;
  }

  [[nodiscard]] ProfileKind kind() const noexcept { return kind_; }
  [[nodiscard]] double omega0() const noexcept { return omega0_; }
  [[nodiscard]] double gamma() const noexcept { return gamma_; }
  [[nodiscard]] bool has_closed_form() const noexcept { return kind_ != ProfileKind::Tabulated; }
  [[nodiscard]] std::pair<double, double> table_range() const noexcept { return {lo_, hi_}; }
  /// Slow-time nodes of a Tabulated profile (empty otherwise).
  [[nodiscard]] std::span<const double> table_nodes() const noexcept {
    if (!table_) return {};
    return table_->interp.nodes();
  }

  /// Omega(s).
  [[nodiscard]] double at(double s) const {
    double value = 0.0;
    switch (kind_) {
      case ProfileKind::Constant: value = omega0_; break;
      case ProfileKind::Decaying: value = omega0_ / std::sqrt(1.0 + s * s); break;
      case ProfileKind::Growing: value = omega0_ * std::sqrt(1.0 + s * s); break;
      case ProfileKind::Oscillating: value = omega0_ * (1.0 + gamma_ * std::sin(2.0 * s)); break;
      case ProfileKind::Tabulated:
        check_range(s);
        value = table_->interp(s);
        break;
    }
    require(value > 0.0, ErrorCode::NonPositiveFrequency,
            "frequency " + std::to_string(value) + " at s = " + std::to_string(s));
    return value;
  }

  /// dOmega/ds.
  [[nodiscard]] double slope(double s) const {
    switch (kind_) {
      case ProfileKind::Constant: return 0.0;
      case ProfileKind::Decaying: return -omega0_ * s / std::pow(1.0 + s * s, 1.5);
      case ProfileKind::Growing: return omega0_ * s / std::sqrt(1.0 + s * s);
      case ProfileKind::Oscillating: return 2.0 * omega0_ * gamma_ * std::cos(2.0 * s);
      case ProfileKind::Tabulated: check_range(s); return table_->interp.prime(s);
    }
    return 0.0;
  }

 private:
  struct Table {
    Table(std::vector<double> s, std::vector<double> omega) : interp(std::move(s), std::move(omega)) {}
    MonotoneCubic interp;
  };

  FrequencyProfile(ProfileKind kind, double omega0, double gamma) : kind_(kind), omega0_(omega0), gamma_(gamma) {
    require(std::isfinite(omega0) && omega0 > 0.0, ErrorCode::NonPositiveFrequency,
            "omega0 must be positive, got " + std::to_string(omega0));
  }

  void check_range(double s) const {
    // One-ulp-scale slack so endpoints reached through eps*t rounding are accepted.
    const double slack = 1e-12 * std::max(1.0, std::max(std::abs(lo_), std::abs(hi_)));
    require(s >= lo_ - slack && s <= hi_ + slack, ErrorCode::OutOfRange,
            "s = " + std::to_string(s) + " outside table range [" + std::to_string(lo_) + ", " +
                std::to_string(hi_) + "]");
  }

  ProfileKind kind_;
  double omega0_;
  double gamma_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::shared_ptr<const Table> table_;
};

/// omega(t) = Omega(eps t).
inline double omega_eval(const FrequencyProfile& profile, double eps, double t) {
  require(eps >= 0.0, ErrorCode::InvalidArgument, "eps must be non-negative");
  return profile.at(eps * t);
}

/// d omega / dt = eps Omega'(eps t).
inline double omega_rate(const FrequencyProfile& profile, double eps, double t) {
  return eps * profile.slope(eps * t);
}

namespace detail {

// Antiderivative of Omega(s) in s, for the closed-form kinds.
inline double slow_antiderivative(const FrequencyProfile& p, double s) {
  const double w0 = p.omega0();
  switch (p.kind()) {
    case ProfileKind::Constant: return w0 * s;
    case ProfileKind::Decaying: return w0 * std::asinh(s);
    case ProfileKind::Growing: return 0.5 * w0 * (s * std::sqrt(1.0 + s * s) + std::asinh(s));
    case ProfileKind::Oscillating: return w0 * (s - 0.5 * p.gamma() * std::cos(2.0 * s));
    case ProfileKind::Tabulated: break;
  }
  fail(ErrorCode::InvalidArgument, "no closed-form antiderivative for tabulated profile");
}

}  // namespace detail

/// Signed phase integral  int_{t0}^{t} Omega(eps t') dt'.
inline double phase_integral(const FrequencyProfile& profile, double eps, double t0, double t) {
  require(eps >= 0.0, ErrorCode::InvalidArgument, "eps must be non-negative");
  if (t == t0) return 0.0;
  if (eps == 0.0) return profile.at(0.0) * (t - t0);

  switch (profile.kind()) {
    case ProfileKind::Constant:
      return profile.omega0() * (t - t0);
    case ProfileKind::Oscillating: {
      // cos a - cos b written as a product avoids cancellation for small eps.
      const double w0 = profile.omega0();
      return w0 * ((t - t0) + profile.gamma() * std::sin(eps * (t + t0)) * std::sin(eps * (t - t0)) / eps);
    }
    case ProfileKind::Decaying:
    case ProfileKind::Growing:
      return (detail::slow_antiderivative(profile, eps * t) - detail::slow_antiderivative(profile, eps * t0)) /
             eps;
    case ProfileKind::Tabulated: {
      // Integrate node interval by node interval: the interpolant is only C1
      // across nodes, and a single adaptive pass can alias against them.
      const double lo = std::min(t0, t), hi = std::max(t0, t);
      std::vector<double> cuts{lo};
      for (double node : profile.table_nodes()) {
        const double tn = node / eps;
        if (tn > lo && tn < hi) cuts.push_back(tn);
      }
      cuts.push_back(hi);
      const double piece_tol = 1e-10 / static_cast<double>(cuts.size() - 1);
      double sum = 0.0;
      for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        sum += adaptive_simpson([&](double tp) { return profile.at(eps * tp); }, cuts[i], cuts[i + 1], piece_tol);
      }
      return t >= t0 ? sum : -sum;
    }
  }
  return 0.0;
}

}  // namespace pinney
