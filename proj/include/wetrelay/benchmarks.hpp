#pragma once

#include <algorithm>
#include <cmath>

#include "wetrelay/batteryless.hpp"
#include "wetrelay/channel.hpp"
#include "wetrelay/mi.hpp"
#include "wetrelay/numeric.hpp"

namespace wetrelay {

/// Benchmark 1: optimal source signaling but Gaussian relay symbols. The rate
/// is the smaller side of the Case-2 inequality.
inline double benchmark1_rate(const NormalizedChannel& ch, const SystemParams& p,
                              const QuadratureSpec& quad = {},
                              const SmithSolverConfig& cfg = {}) {
  if (p.P_R == 0.0) return 0.0;
  const auto chk = check_case2(ch, p, quad, cfg);
  return std::min(chk.lhs_bits, chk.rhs_bits);
}

struct Benchmark2Result {
  double rate_bits = 0.0;
  long best_t = 0;
  double relaxed_t = 0.0;  // real-relaxation optimum (search accelerator only)
};

/// Benchmark 2: battery source that stays silent for t slots, then sends one
/// Gaussian codeword. Integer t; the real relaxation only cross-checks.
inline Benchmark2Result benchmark2_rate_detailed(const NormalizedChannel& ch,
                                                 const SystemParams& p) {
  Benchmark2Result out;
  if (p.P_R == 0.0) return out;
  const double a = p.eta * ch.h_SR_sq;
  auto rate_at = [&](double t) {
    const double arg = ((1.0 + t) * a * p.P_R - p.P_C) / ch.sigma_R_sq;
    if (arg <= 0.0) return 0.0;
    return 0.5 * std::log1p(arg) / kLn2 / (1.0 + t);
  };
  long t0 = 0;
  if (a * p.P_R <= p.P_C) t0 = static_cast<long>(std::floor(p.P_C / (a * p.P_R)));
  while (rate_at(static_cast<double>(t0)) <= 0.0) ++t0;

  double best = 0.0;
  long best_t = t0;
  int decreasing = 0;
  double prev = -1.0;
  for (long t = t0;; ++t) {
    const double r = rate_at(static_cast<double>(t));
    if (r > best) {
      best = r;
      best_t = t;
    }
    if (prev >= 0.0 && r < prev) {
      if (++decreasing >= 3) break;
    } else {
      decreasing = 0;
    }
    prev = r;
  }
  // golden-section on the real relaxation, rounded to neighbors
  {
    const auto m = golden_max(rate_at, static_cast<double>(t0),
                              static_cast<double>(std::max<long>(best_t * 4 + 8, t0 + 8)), 200);
    out.relaxed_t = m.first;
    for (double cand : {std::floor(m.first), std::ceil(m.first)}) {
      if (cand >= 0.0 && rate_at(cand) > best) {
        best = rate_at(cand);
        best_t = static_cast<long>(cand);
      }
    }
  }
  out.best_t = best_t;
  out.rate_bits = std::min(best, gaussian_capacity(p.P_R, ch.sigma_D_sq));
  return out;
}

inline double benchmark2_rate(const NormalizedChannel& ch, const SystemParams& p) {
  return benchmark2_rate_detailed(ch, p).rate_bits;
}

/// Benchmark 3: benchmark 2 with t fixed to zero (no energy conservation).
inline double benchmark3_rate(const NormalizedChannel& ch, const SystemParams& p) {
  if (p.P_R == 0.0) return 0.0;
  const double arg = (p.eta * ch.h_SR_sq * p.P_R - p.P_C) / ch.sigma_R_sq;
  if (arg <= 0.0) return 0.0;
  return std::min(0.5 * std::log1p(arg) / kLn2, gaussian_capacity(p.P_R, ch.sigma_D_sq));
}

}  // namespace wetrelay
