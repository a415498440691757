#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "pinney/error.hpp"

namespace pinney {

/// Shape-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
/// slopes with the three-point one-sided end condition). Between two nodes
/// the interpolant stays within the range of the node values, so positive
/// data yield a positive curve.
class MonotoneCubic {
 public:
  MonotoneCubic(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    require(n >= 2 && y_.size() == n, ErrorCode::InvalidArgument, "monotone cubic needs matching nodes");
    std::vector<double> h(n - 1), delta(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      require(h[i] > 0.0, ErrorCode::InvalidArgument, "nodes must be strictly increasing");
      delta[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    d_.assign(n, 0.0);
    if (n == 2) {
      d_[0] = d_[1] = delta[0];
      return;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      if (delta[k - 1] * delta[k] <= 0.0) continue;
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
    d_[0] = end_slope(h[0], h[1], delta[0], delta[1]);
    d_[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
  }

  [[nodiscard]] const std::vector<double>& nodes() const noexcept { return x_; }

  [[nodiscard]] double operator()(double x) const {
    const auto [i, t, hk] = locate(x);
    const double t2 = t * t, t3 = t2 * t;
    const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
    const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
    return h00 * y_[i] + h10 * hk * d_[i] + h01 * y_[i + 1] + h11 * hk * d_[i + 1];
  }

  [[nodiscard]] double prime(double x) const {
    const auto [i, t, hk] = locate(x);
    const double t2 = t * t;
    const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
    const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
    return (d00 * y_[i] + d01 * y_[i + 1]) / hk + d10 * d_[i] + d11 * d_[i + 1];
  }

 private:
  struct Where {
    std::size_t i;
    double t;
    double h;
  };

  static double end_slope(double h0, double h1, double d0, double d1) {
    double d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (std::signbit(d) != std::signbit(d0) || d0 == 0.0) return 0.0;
    if (std::signbit(d0) != std::signbit(d1) && std::abs(d) > 3.0 * std::abs(d0)) d = 3.0 * d0;
    return d;
  }

  [[nodiscard]] Where locate(double x) const {
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = it == x_.begin() ? 0 : static_cast<std::size_t>(it - x_.begin()) - 1;
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    return {i, (x - x_[i]) / h, h};
  }

  std::vector<double> x_;
  std::vector<double> y_;
  std::vector<double> d_;
};

}  // namespace pinney
