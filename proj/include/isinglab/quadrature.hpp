#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "isinglab/errors.hpp"

namespace isinglab {

namespace detail {

inline double simpson(double a, double fa, double b, double fb, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <typename F>
double adaptive_simpson_rec(F&& f, double a, double fa, double b, double fb, double m, double fm,
                            double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(a, fa, m, fm, flm);
  const double right = simpson(m, fm, b, fb, frm);
  const double delta = left + right - whole;
  if (depth <= 0) throw numerical_error("adaptive quadrature did not converge");
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson quadrature with absolute tolerance.
template <typename F>
double adaptive_simpson(F&& f, double a, double b, double tol, int max_depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fb = f(b), fm = f(m);
  const double whole = detail::simpson(a, fa, b, fb, fm);
  return detail::adaptive_simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

// Quadrature split at interior knots (integrand kinks); knots outside (a, b)
// are ignored.
template <typename F>
double adaptive_simpson_with_knots(F&& f, double a, double b, std::vector<double> knots,
                                   double tol) {
  std::vector<double> pts;
  pts.push_back(a);
  for (double k : knots)
    if (k > a && k < b) pts.push_back(k);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  const double piece_tol = tol / static_cast<double>(pts.size() - 1);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k)
    total += adaptive_simpson(f, pts[k], pts[k + 1], piece_tol);
  return total;
}

}  // namespace isinglab
