#pragma once

// Finite-difference weights on arbitrary grids (Fornberg's recursion) and
// centred 5-point derivatives of sampled data.

#include <cstddef>
#include <span>
#include <vector>

#include "pinney/error.hpp"

namespace pinney {

/// Weights w[d][j] such that f^(d)(z) ~ sum_j w[d][j] f(x[j]), d = 0..max_order.
inline std::vector<std::vector<double>> fornberg_weights(double z, std::span<const double> x, int max_order) {
  const std::size_t n = x.size();
  require(n >= 1 && max_order >= 0 && static_cast<std::size_t>(max_order) < n, ErrorCode::InvalidArgument,
          "stencil needs more points than the derivative order");
  const auto m = static_cast<std::size_t>(max_order);
  std::vector<std::vector<double>> c(m + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - z;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - z;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      require(c3 != 0.0, ErrorCode::InvalidArgument, "stencil nodes must be distinct");
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[k][i] = c1 * (static_cast<double>(k) * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        }
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[k][j] = (c4 * c[k][j] - static_cast<double>(k) * c[k - 1][j]) / c3;
      }
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

/// d-th derivative of f at x[i] from the 5 points x[i-2..i+2]; needs 2 <= i <= n-3.
inline double centered5(std::span<const double> x, std::span<const double> f, std::size_t i, int order) {
  require(x.size() == f.size(), ErrorCode::InvalidArgument, "grid and values differ in length");
  require(i >= 2 && i + 2 < x.size(), ErrorCode::InvalidArgument, "5-point stencil needs two neighbours each side");
  const auto w = fornberg_weights(x[i], x.subspan(i - 2, 5), order);
  double acc = 0.0;
  for (std::size_t j = 0; j < 5; ++j) acc += w[static_cast<std::size_t>(order)][j] * f[i - 2 + j];
  return acc;
}

}  // namespace pinney
