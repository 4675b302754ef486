#pragma once

#include <cmath>
#include <vector>

#include "wetrelay/channel.hpp"
#include "wetrelay/quadrature.hpp"
#include "wetrelay/types.hpp"

namespace wetrelay {

/// Mixture of Gaussians sharing one variance; log-density evaluated in
/// log-space so deep inter-cluster valleys do not underflow.
struct GaussianMixture {
  std::vector<double> means;
  std::vector<double> log_probs;
  double sigma = 1.0;

  static GaussianMixture from_distribution(const MassPointDistribution& d, double noise_var) {
    GaussianMixture m;
    m.sigma = std::sqrt(noise_var);
    m.means.reserve(d.size());
    m.log_probs.reserve(d.size());
    for (const auto& p : d.points) {
      if (p.prob <= 0.0) continue;
      m.means.push_back(p.value);
      m.log_probs.push_back(std::log(p.prob));
    }
    return m;
  }

  double log_density(double y) const {
    const double lognorm = -std::log(sigma) - 0.5 * std::log(2.0 * M_PI);
    double best = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < means.size(); ++k) {
      const double z = (y - means[k]) / sigma;
      best = std::max(best, log_probs[k] - 0.5 * z * z);
    }
    if (!std::isfinite(best)) return best;
    double acc = 0.0;
    for (size_t k = 0; k < means.size(); ++k) {
      const double z = (y - means[k]) / sigma;
      acc += std::exp(log_probs[k] - 0.5 * z * z - best);
    }
    return best + std::log(acc) + lognorm;
  }
};

/// Differential entropy h(Y) in bits of the mixture, by cluster-merged panels.
inline double mixture_entropy_bits(const GaussianMixture& m, const QuadratureSpec& spec) {
  const auto clusters = merged_clusters(m.means, spec.truncation_sigmas * m.sigma);
  auto integrand = [&](double y) {
    const double lp = m.log_density(y);
    if (lp < -700.0) return 0.0;  // p*log p vanishes faster than the log grows
    return -std::exp(lp) * lp / kLn2;
  };
  return integrate_clusters(integrand, clusters, m.sigma, spec);
}

/// I(X;Y) in bits for Y = X + N(0, noise_var), X distributed per dist.
inline double mi_discrete_awgn(const MassPointDistribution& dist, double noise_var,
                               const QuadratureSpec& spec = {}) {
  if (!(noise_var > 0)) throw ConfigError("mi_discrete_awgn: noise_var must be > 0");
  dist.validate(1e-9);
  const auto m = GaussianMixture::from_distribution(dist, noise_var);
  const double h_y = mixture_entropy_bits(m, spec);
  const double h_noise = 0.5 * std::log(2.0 * M_PI * M_E * noise_var) / kLn2;
  return std::max(0.0, h_y - h_noise);
}

/// Exact mutual information of equiprobable +/-A inputs at snr = A^2/noise_var:
/// snr/ln2 - E_t[ log2 cosh(snr + sqrt(snr) t) ], t standard normal.
inline double mi_bpsk_exact(double snr, const QuadratureSpec& spec = {}) {
  if (!(snr >= 0)) throw ConfigError("mi_bpsk_exact: snr must be >= 0");
  if (snr == 0.0) return 0.0;
  const double rt = std::sqrt(snr);
  auto integrand = [&](double t) {
    return std::exp(-0.5 * t * t) / std::sqrt(2.0 * M_PI) * log_cosh(snr + rt * t) / kLn2;
  };
  const double T = std::max(spec.truncation_sigmas, 10.0);
  const double val = snr / kLn2 - integrate_window(integrand, -T, T, 1.0, spec);
  return std::max(0.0, val);
}

/// High-snr surrogate for the amplitude-constrained capacity (uniform input).
inline double mi_uniform_approx(double snr) {
  if (!(snr >= 0)) throw ConfigError("mi_uniform_approx: snr must be >= 0");
  return 0.5 * std::log1p(2.0 * snr / (M_PI * M_E)) / kLn2;
}

inline double gaussian_capacity(double power, double noise_var) {
  if (!(noise_var > 0)) throw ConfigError("gaussian_capacity: noise_var must be > 0");
  if (!(power >= 0)) throw ConfigError("gaussian_capacity: power must be >= 0");
  return 0.5 * std::log1p(power / noise_var) / kLn2;
}

}  // namespace wetrelay
