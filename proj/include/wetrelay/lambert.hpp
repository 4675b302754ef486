#pragma once

#include <cmath>

#include "wetrelay/common.hpp"

namespace wetrelay {

enum class LambertBranch { kPrincipal, kMinusOne };

namespace detail {

/// Puiseux series about the branch point x = -1/e; p = +/- sqrt(2(e x + 1)).
inline double branch_point_seed(double p) {
  return -1.0 + p - p * p / 3.0 + 11.0 * p * p * p / 72.0;
}

}  // namespace detail

/// Lambert W on the requested real branch: returns w with w*exp(w) = x,
/// |w e^w - x| <= 1e-13 max(1,|x|). Halley iteration from a branch-appropriate
/// seed; arguments within round-off below -1/e snap to the branch point.
inline double lambert_w(LambertBranch branch, double x) {
  const double min_arg = -std::exp(-1.0);
  if (x < min_arg) {
    if (x > min_arg * (1.0 + 1e-12)) return -1.0;  // round-off at the branch point
    throw std::domain_error("lambert_w: argument below -1/e");
  }
  if (branch == LambertBranch::kMinusOne && x >= 0.0)
    throw std::domain_error("lambert_w: minus-one branch needs x < 0");
  if (x == 0.0) return 0.0;

  double w;
  const double q = 2.0 * (M_E * x + 1.0);
  if (branch == LambertBranch::kPrincipal) {
    if (q < 0.5) {
      w = detail::branch_point_seed(std::sqrt(std::max(q, 0.0)));
    } else if (x < M_E) {
      w = x / (1.0 + x);  // decent on (-1/e, e)
    } else {
      const double l = std::log(x);
      w = l - std::log(l);
    }
  } else {
    if (q < 0.5) {
      w = detail::branch_point_seed(-std::sqrt(std::max(q, 0.0)));
    } else {
      const double l = std::log(-x);
      w = l - std::log(-l);
    }
  }

  const double tol = 1e-13 * std::max(1.0, std::fabs(x));
  for (int it = 0; it < 64; ++it) {
    const double ew = std::exp(w);
    const double f = w * ew - x;
    if (std::fabs(f) <= tol) return w;
    const double wp1 = w + 1.0;
    double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
    if (denom == 0.0 || !std::isfinite(denom)) denom = ew * wp1;
    w -= f / denom;
    if (branch == LambertBranch::kMinusOne && w > -1.0) w = -1.0 - 1e-12;
    if (branch == LambertBranch::kPrincipal && w < -1.0) w = -1.0 + 1e-12;
  }
  const double resid = std::fabs(w * std::exp(w) - x);
  if (resid <= tol * 16) return w;  // flat derivative near the branch point
  throw SolverError("lambert_w: Halley iteration stalled", resid);
}

}  // namespace wetrelay
