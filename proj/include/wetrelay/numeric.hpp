#pragma once

#include <cmath>
#include <utility>

namespace wetrelay {

/// Golden-section maximizer on [a, b]; returns (argmax, max). f unimodal.
template <typename F>
std::pair<double, double> golden_max(const F& f, double a, double b, int iters = 200) {
  const double gr = 0.6180339887498949;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters && (b - a) > 0; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + gr * (b - a); f2 = f(x2);
    } else {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - gr * (b - a); f1 = f(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, f(xm)};
}

/// Bisection for the root of a monotone-increasing-in-sign function on [lo, hi].
/// pred(x) is "true above the root"; returns the bracket midpoint after iters.
template <typename P>
double bisect(const P& pred, double lo, double hi, int iters = 100) {
  for (int i = 0; i < iters; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (pred(mid))
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace wetrelay
