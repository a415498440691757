#pragma once

#include <cmath>
#include <cstddef>

#include "pinney/error.hpp"

namespace pinney {

namespace detail {

template <class F>
double simpson_recurse(const F& f, double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature of f over [a, b] (signed: b < a is allowed)
/// with Richardson correction. `abs_tol` bounds the total absolute error.
template <class F>
double adaptive_simpson(const F& f, double a, double b, double abs_tol = 1e-10, int max_depth = 50) {
  require(abs_tol > 0.0, ErrorCode::InvalidArgument, "quadrature tolerance must be positive");
  if (a == b) return 0.0;
  // A handful of initial panels keeps the recursion from accepting a lucky
  // coarse estimate on oscillatory integrands.
  constexpr int panels = 8;
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) {
    const double lo = a + i * width;
    const double hi = (i + 1 == panels) ? b : a + (i + 1) * width;
    const double flo = f(lo);
    const double fhi = f(hi);
    const double fmid = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
    total += detail::simpson_recurse(f, lo, hi, flo, fmid, fhi, whole, abs_tol / panels, max_depth);
  }
  return total;
}

}  // namespace pinney
