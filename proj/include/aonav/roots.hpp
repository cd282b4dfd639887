#pragma once

#include <algorithm>
#include <cmath>
#include <functional>

namespace aonav::detail {

// Real roots of c2*x^2 + c1*x + c0 = 0, ascending. Falls back to the linear
// case when the quadratic coefficient is negligible against the others.
inline int real_roots_quadratic(double c2, double c1, double c0, double out[2]) {
  const double scale = std::max({std::fabs(c2), std::fabs(c1), std::fabs(c0)});
  if (scale == 0.0) return 0;
  if (std::fabs(c2) <= 1e-14 * scale) {
    if (std::fabs(c1) <= 1e-14 * scale) return 0;
    out[0] = -c0 / c1;
    return 1;
  }
  const double disc = c1 * c1 - 4.0 * c2 * c0;
  if (disc < 0.0) return 0;
  const double sq = std::sqrt(disc);
  // Citardauq form avoids cancellation.
  const double q = -0.5 * (c1 + (c1 >= 0.0 ? sq : -sq));
  double r0 = q / c2;
  double r1 = (q != 0.0) ? c0 / q : r0;
  if (r0 > r1) std::swap(r0, r1);
  out[0] = r0;
  out[1] = r1;
  return (disc == 0.0) ? 1 : 2;
}

// Real roots of c3*x^3 + c2*x^2 + c1*x + c0 = 0, ascending. Trigonometric /
// Cardano method on the depressed cubic, with a Newton polish per root.
inline int real_roots_cubic(double c3, double c2, double c1, double c0, double out[3]) {
  const double scale = std::max({std::fabs(c3), std::fabs(c2), std::fabs(c1), std::fabs(c0)});
  if (scale == 0.0) return 0;
  if (std::fabs(c3) <= 1e-12 * scale) return real_roots_quadratic(c2, c1, c0, out);

  const double a = c2 / c3, b = c1 / c3, c = c0 / c3;
  // x = t - a/3 gives t^3 + p t + q = 0.
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double shift = a / 3.0;

  int n = 0;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    const double u = std::cbrt(-q / 2.0 + sq);
    const double v = std::cbrt(-q / 2.0 - sq);
    out[0] = u + v - shift;
    n = 1;
  } else if (p == 0.0 && q == 0.0) {
    out[0] = -shift;
    n = 1;
  } else {
    // Three real roots.
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) {
      out[n++] = m * std::cos(theta - 2.0 * M_PI * k / 3.0) - shift;
    }
  }

  for (int i = 0; i < n; ++i) {
    double x = out[i];
    for (int it = 0; it < 2; ++it) {
      const double f = ((c3 * x + c2) * x + c1) * x + c0;
      const double df = (3.0 * c3 * x + 2.0 * c2) * x + c1;
      if (df != 0.0 && std::isfinite(f / df)) x -= f / df;
    }
    out[i] = x;
  }
  std::sort(out, out + n);
  return n;
}

// Golden-section minimisation of f over [a, b]; returns the abscissa of the
// located minimum to within `tol`.
template <typename F>
double golden_min(F&& f, double a, double b, double tol) {
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// Bisection for the crossing of f inside [a, b], assuming f(a) and f(b) have
// opposite signs (f(a) > 0 >= f(b) in our callers).
template <typename F>
double bisect_root(F&& f, double a, double b, double tol) {
  double fa = f(a);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if ((fa > 0.0) == (fm > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace aonav::detail
