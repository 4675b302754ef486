#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "wetrelay/mi.hpp"
#include "wetrelay/numeric.hpp"
#include "wetrelay/quadrature.hpp"
#include "wetrelay/types.hpp"

namespace wetrelay {

/// Controls the incremental-support solver for the amplitude-constrained
/// source input. Thresholds select the closed-form regimes; widen them to
/// (0, inf) to force the general path.
struct SmithSolverConfig {
  double kkt_tolerance = 1e-6;  // bits
  int max_mass_points = 64;
  int multistart_count = 1;
  unsigned seed = 1;
  double low_snr_threshold = 0.05;
  double high_snr_threshold = 100.0;
  int uniform_grid_points = 513;  // materialization of the uniform surrogate
  int kkt_scan_points = 801;      // info-density scan on [0, 1]
  int max_outer_rounds = 160;
  bool use_value_table = true;    // composites may interpolate solver values

  void validate() const {
    if (!(kkt_tolerance > 0)) throw ConfigError("kkt_tolerance must be > 0");
    if (max_mass_points < 2) throw ConfigError("max_mass_points must be >= 2");
    if (!(low_snr_threshold < high_snr_threshold))
      throw ConfigError("low_snr_threshold must be < high_snr_threshold");
    if (multistart_count < 1) throw ConfigError("multistart_count must be >= 1");
  }
};

enum class SmithPath { kZero, kLowSnrBinary, kHighSnrUniform, kGeneral };

struct SmithResult {
  MassPointDistribution dist;  // over v in [-1, 1]
  double mi_bits = 0.0;
  double kkt_residual_bits = 0.0;
  int mass_points = 1;
  int iterations = 0;
  bool converged = true;
  SmithPath path = SmithPath::kZero;
};

namespace detail {

/// Symmetric support state for the normalized problem Y = v*A + Z, Z~N(0,1).
/// Arms live in (0, 1] and carry the probability of the +/- pair together.
struct SmithState {
  double A = 1.0;
  std::vector<double> arm_v;
  std::vector<double> arm_q;
  double center_q = 0.0;  // mass at v = 0

  MassPointDistribution to_dist() const {
    MassPointDistribution d;
    for (size_t i = 0; i < arm_v.size(); ++i) {
      d.points.push_back({-arm_v[i], 0.5 * arm_q[i]});
      d.points.push_back({arm_v[i], 0.5 * arm_q[i]});
    }
    if (center_q > 0.0) d.points.push_back({0.0, center_q});
    d.canonicalize(0.0, 0.0);
    return d;
  }

  GaussianMixture mixture() const {
    GaussianMixture m;
    m.sigma = 1.0;
    auto push = [&](double mean, double q) {
      if (q <= 0.0) return;
      m.means.push_back(mean);
      m.log_probs.push_back(std::log(q));
    };
    for (size_t i = 0; i < arm_v.size(); ++i) {
      push(-arm_v[i] * A, 0.5 * arm_q[i]);
      push(arm_v[i] * A, 0.5 * arm_q[i]);
    }
    push(0.0, center_q);
    return m;
  }

  void normalize() {
    double s = center_q;
    for (double q : arm_q) s += q;
    center_q /= s;
    for (double& q : arm_q) q /= s;
  }
};

inline double smith_mi_bits(const SmithState& st, const QuadratureSpec& spec) {
  const auto m = st.mixture();
  const double h_noise = 0.5 * std::log(2.0 * M_PI * M_E) / kLn2;
  return std::max(0.0, mixture_entropy_bits(m, spec) - h_noise);
}

/// Marginal information density i(v) in bits against the current output law.
inline double smith_info_density(const GaussianMixture& mix, double A, double v,
                                 const QuadratureSpec& spec) {
  const double mu = v * A;
  const double T = spec.truncation_sigmas;
  auto integrand = [&](double y) {
    const double z = y - mu;
    const double logphi = -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
    return std::exp(logphi) * (logphi - mix.log_density(y)) / kLn2;
  };
  QuadratureSpec local = spec;
  local.method = QuadMethod::kFixedOrder;  // fixed fine panels; outer loops re-verify
  local.node_count = std::max(local.node_count, 15 * static_cast<int>(2 * T));
  return integrate_window(integrand, mu - T, mu + T, 1.0, local);
}

/// dI/dv for a symmetric arm at v (bits per unit v).
inline double smith_arm_gradient(const SmithState& st, const GaussianMixture& mix, size_t arm,
                                 const QuadratureSpec& spec) {
  const double mu = st.arm_v[arm] * st.A;
  const double pk = 0.5 * st.arm_q[arm];
  const double T = spec.truncation_sigmas;
  auto integrand = [&](double y) {
    const double z = y - mu;
    const double logphi = -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
    return std::exp(logphi) * z * mix.log_density(y);
  };
  QuadratureSpec local = spec;
  local.method = QuadMethod::kFixedOrder;
  local.node_count = std::max(local.node_count, 15 * static_cast<int>(2 * T));
  const double dmu = -pk / kLn2 * integrate_window(integrand, mu - T, mu + T, 1.0, local);
  return 2.0 * st.A * dmu;  // mirrored arm contributes equally by symmetry
}

inline void smith_prob_update(SmithState& st, const QuadratureSpec& spec, double tol_bits,
                              int max_iters) {
  const size_t n = st.arm_v.size();
  for (int it = 0; it < max_iters; ++it) {
    const auto mix = st.mixture();
    std::vector<double> dens(n + 1);
    for (size_t i = 0; i < n; ++i) dens[i] = smith_info_density(mix, st.A, st.arm_v[i], spec);
    dens[n] = st.center_q > 0.0 ? smith_info_density(mix, st.A, 0.0, spec) : 0.0;
    double avg = 0.0;
    double dmax = -1e300;
    for (size_t i = 0; i < n; ++i) {
      avg += st.arm_q[i] * dens[i];
      if (st.arm_q[i] > 0) dmax = std::max(dmax, dens[i]);
    }
    if (st.center_q > 0.0) {
      avg += st.center_q * dens[n];
      dmax = std::max(dmax, dens[n]);
    }
    if (dmax - avg < tol_bits) return;
    for (size_t i = 0; i < n; ++i) st.arm_q[i] *= std::exp((dens[i] - dmax) * kLn2);
    if (st.center_q > 0.0) st.center_q *= std::exp((dens[n] - dmax) * kLn2);
    st.normalize();
  }
}

inline void smith_location_update(SmithState& st, const QuadratureSpec& spec, double& step,
                                  int rounds) {
  for (int r = 0; r < rounds; ++r) {
    const auto mix = st.mixture();
    std::vector<double> grad(st.arm_v.size());
    double gmax = 0.0;
    for (size_t i = 0; i < st.arm_v.size(); ++i) {
      grad[i] = smith_arm_gradient(st, mix, i, spec);
      gmax = std::max(gmax, std::fabs(grad[i]));
    }
    if (gmax == 0.0) return;
    const double base = smith_mi_bits(st, spec);
    bool improved = false;
    for (int half = 0; half < 12; ++half) {
      SmithState trial = st;
      for (size_t i = 0; i < trial.arm_v.size(); ++i)
        trial.arm_v[i] = std::clamp(trial.arm_v[i] + step * grad[i] / gmax, 0.0, 1.0);
      std::sort(trial.arm_v.begin(), trial.arm_v.end());
      if (smith_mi_bits(trial, spec) > base + 1e-14) {
        // keep probs paired with sorted locations by re-sorting jointly
        std::vector<std::pair<double, double>> vq(st.arm_v.size());
        for (size_t i = 0; i < st.arm_v.size(); ++i)
          vq[i] = {std::clamp(st.arm_v[i] + step * grad[i] / gmax, 0.0, 1.0), st.arm_q[i]};
        std::sort(vq.begin(), vq.end());
        for (size_t i = 0; i < vq.size(); ++i) {
          st.arm_v[i] = vq[i].first;
          st.arm_q[i] = vq[i].second;
        }
        improved = true;
        step = std::min(step * 1.6, 0.25);
        break;
      }
      step *= 0.5;
    }
    if (!improved) return;
  }
}

/// Merge arms that collapsed onto each other or onto zero.
inline void smith_tidy(SmithState& st) {
  const double eps = 1e-7;
  std::vector<double> v, q;
  double c = st.center_q;
  for (size_t i = 0; i < st.arm_v.size(); ++i) {
    if (st.arm_q[i] <= 1e-14) continue;
    if (st.arm_v[i] < eps) {
      c += st.arm_q[i];
      continue;
    }
    if (!v.empty() && st.arm_v[i] - v.back() < eps) {
      q.back() += st.arm_q[i];
      continue;
    }
    v.push_back(st.arm_v[i]);
    q.push_back(st.arm_q[i]);
  }
  st.arm_v = std::move(v);
  st.arm_q = std::move(q);
  st.center_q = c;
  if (st.arm_v.empty() && st.center_q <= 0.0) {
    st.arm_v = {1.0};
    st.arm_q = {1.0};
    st.center_q = 0.0;
  }
  st.normalize();
}

inline SmithResult smith_general(double A, const SmithSolverConfig& cfg,
                                 const QuadratureSpec& spec, SmithState init) {
  SmithState st = std::move(init);
  double step = 0.05;
  SmithResult res;
  res.path = SmithPath::kGeneral;
  const int half_scan = std::max(64, cfg.kkt_scan_points / 2);
  for (int outer = 0; outer < cfg.max_outer_rounds; ++outer) {
    res.iterations = outer + 1;
    smith_prob_update(st, spec, cfg.kkt_tolerance / 8.0, 400);
    smith_location_update(st, spec, step, 4);
    smith_prob_update(st, spec, cfg.kkt_tolerance / 8.0, 400);
    smith_tidy(st);

    const auto mix = st.mixture();
    const double mi = smith_mi_bits(st, spec);
    double worst_v = 1.0, worst_i = -1e300;
    for (int s = 0; s <= half_scan; ++s) {
      const double v = static_cast<double>(s) / half_scan;
      const double iv = smith_info_density(mix, A, v, spec);
      if (iv > worst_i) {
        worst_i = iv;
        worst_v = v;
      }
    }
    const double dv = 1.0 / half_scan;
    auto iv_of = [&](double v) { return smith_info_density(mix, A, v, spec); };
    const auto polished = golden_max(iv_of, std::max(0.0, worst_v - dv),
                                     std::min(1.0, worst_v + dv), 40);
    if (polished.second > worst_i) {
      worst_i = polished.second;
      worst_v = polished.first;
    }
    res.kkt_residual_bits = worst_i - mi;
    res.mi_bits = mi;
    if (res.kkt_residual_bits <= cfg.kkt_tolerance) {
      res.converged = true;
      res.dist = st.to_dist();
      res.mass_points = static_cast<int>(res.dist.size());
      return res;
    }
    const int pts_now = static_cast<int>(st.arm_v.size()) * 2 + (st.center_q > 0 ? 1 : 0);
    const bool collides =
        (worst_v < 1e-6 && st.center_q > 0.0) ||
        std::any_of(st.arm_v.begin(), st.arm_v.end(),
                    [&](double v) { return std::fabs(v - worst_v) < 1e-6; });
    if (!collides) {
      if (pts_now + 2 > cfg.max_mass_points) break;
      const double seed_q = 1e-3;
      if (worst_v < 1e-6) {
        st.center_q += seed_q;
      } else {
        st.arm_v.push_back(worst_v);
        st.arm_q.push_back(seed_q);
      }
      std::vector<std::pair<double, double>> vq;
      for (size_t i = 0; i < st.arm_v.size(); ++i) vq.emplace_back(st.arm_v[i], st.arm_q[i]);
      std::sort(vq.begin(), vq.end());
      for (size_t i = 0; i < vq.size(); ++i) {
        st.arm_v[i] = vq[i].first;
        st.arm_q[i] = vq[i].second;
      }
      st.normalize();
    }
    // collision means the inner optimization has to push further; loop again
  }
  res.converged = false;
  res.dist = st.to_dist();
  res.mass_points = static_cast<int>(res.dist.size());
  return res;
}

}  // namespace detail

/// Capacity-achieving input on [-1,1] for Y = v*sqrt(f_gain) + N(0, noise_var).
/// Fast paths return the closed-form regimes; the general path grows the
/// support until the marginal-information-density condition holds.
inline SmithResult max_mi_amplitude_constrained(double f_gain, double noise_var,
                                                const SmithSolverConfig& cfg = {},
                                                const QuadratureSpec& spec = {}) {
  cfg.validate();
  if (!(noise_var > 0)) throw ConfigError("max_mi_amplitude_constrained: noise_var must be > 0");
  if (!(f_gain >= 0)) throw ConfigError("max_mi_amplitude_constrained: f_gain must be >= 0");

  SmithResult res;
  if (f_gain == 0.0) {
    res.dist = MassPointDistribution::point_mass(0.0);
    res.mi_bits = 0.0;
    res.path = SmithPath::kZero;
    return res;
  }
  const double snr = f_gain / noise_var;
  if (snr < cfg.low_snr_threshold) {
    res.dist = MassPointDistribution::from_arrays({-1.0, 1.0}, {0.5, 0.5});
    res.mi_bits = mi_bpsk_exact(snr, spec);
    res.path = SmithPath::kLowSnrBinary;
    res.mass_points = 2;
    return res;
  }
  if (snr > cfg.high_snr_threshold) {
    const int n = cfg.uniform_grid_points;
    std::vector<double> v(n), p(n, 1.0 / n);
    for (int i = 0; i < n; ++i) v[i] = -1.0 + 2.0 * i / (n - 1);
    res.dist = MassPointDistribution::from_arrays(v, p);
    res.mi_bits = mi_uniform_approx(snr);
    res.path = SmithPath::kHighSnrUniform;
    res.mass_points = n;
    return res;
  }

  const double A = std::sqrt(snr);
  detail::SmithState init;
  init.A = A;
  init.arm_v = {1.0};
  init.arm_q = {1.0};
  SmithResult best = detail::smith_general(A, cfg, spec, init);
  if (cfg.multistart_count > 1) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(0.05, 1.0);
    for (int s = 1; s < cfg.multistart_count; ++s) {
      detail::SmithState st;
      st.A = A;
      const int arms = 1 + static_cast<int>(rng() % 3);
      for (int a = 0; a < arms; ++a) {
        st.arm_v.push_back(unif(rng));
        st.arm_q.push_back(1.0);
      }
      std::sort(st.arm_v.begin(), st.arm_v.end());
      st.normalize();
      SmithResult r = detail::smith_general(A, cfg, spec, st);
      if (r.mi_bits > best.mi_bits) best = r;
    }
  }
  return best;
}

}  // namespace wetrelay
