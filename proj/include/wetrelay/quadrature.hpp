#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "wetrelay/common.hpp"

namespace wetrelay {

enum class QuadMethod { kFixedOrder, kAdaptivePanel };

/// Controls the Gaussian-mixture integrals. The initial pass spreads about
/// node_count Gauss-Legendre nodes over the clusters; the adaptive method
/// keeps bisecting panels until two passes agree to refine_tol.
struct QuadratureSpec {
  int node_count = 129;
  double truncation_sigmas = 8.0;
  QuadMethod method = QuadMethod::kAdaptivePanel;
  double refine_tol = 1e-9;  // absolute, in the integrand's units (bits here)
  int max_refinements = 16;

  void validate() const {
    if (node_count < 16) throw ConfigError("quadrature node_count must be >= 16");
    if (truncation_sigmas < 6.0) throw ConfigError("truncation_sigmas must be >= 6");
    if (!(refine_tol > 0)) throw ConfigError("refine_tol must be > 0");
  }
};

struct Interval {
  double a = 0.0;
  double b = 0.0;
};

/// Merge [c - hw, c + hw] windows around sorted-or-not centers into disjoint intervals.
inline std::vector<Interval> merged_clusters(std::vector<double> centers, double half_width) {
  std::sort(centers.begin(), centers.end());
  std::vector<Interval> out;
  for (double c : centers) {
    if (!out.empty() && c - half_width <= out.back().b) {
      out.back().b = c + half_width;
    } else {
      out.push_back({c - half_width, c + half_width});
    }
  }
  return out;
}

namespace detail {

template <typename F>
double integrate_panels(const F& f, double a, double b, int panels) {
  using gl = boost::math::quadrature::gauss<double, 15>;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int i = 0; i < panels; ++i) total += gl::integrate(f, a + i * h, a + (i + 1) * h);
  return total;
}

}  // namespace detail

/// Integrate f over the given clusters. Panel widths start near one sigma
/// (never fewer than ~node_count nodes across all clusters) and are bisected
/// until two successive passes agree to spec.refine_tol.
template <typename F>
double integrate_clusters(const F& f, const std::vector<Interval>& clusters, double sigma,
                          const QuadratureSpec& spec) {
  spec.validate();
  double len_total = 0.0;
  for (const auto& iv : clusters) len_total += iv.b - iv.a;
  if (len_total <= 0.0) return 0.0;

  const int base_panels = std::max(1, (spec.node_count + 14) / 15);
  std::vector<int> panels(clusters.size());
  for (size_t i = 0; i < clusters.size(); ++i) {
    const double len = clusters[i].b - clusters[i].a;
    const int geom = static_cast<int>(std::ceil(len / std::max(sigma, 1e-300)));
    const int share = static_cast<int>(std::ceil(base_panels * len / len_total));
    panels[i] = std::max({1, geom, share});
  }

  auto pass = [&](int mult) {
    double s = 0.0;
    for (size_t i = 0; i < clusters.size(); ++i)
      s += detail::integrate_panels(f, clusters[i].a, clusters[i].b, panels[i] * mult);
    return s;
  };

  double prev = pass(1);
  if (spec.method == QuadMethod::kFixedOrder) return prev;
  int mult = 2;
  for (int r = 0; r < spec.max_refinements; ++r, mult *= 2) {
    const double cur = pass(mult);
    if (std::fabs(cur - prev) <= spec.refine_tol) return cur;
    prev = cur;
  }
  throw QuadratureError("quadrature did not converge within max_refinements",
                        spec.refine_tol);
}

template <typename F>
double integrate_window(const F& f, double a, double b, double sigma,
                        const QuadratureSpec& spec) {
  return integrate_clusters(f, std::vector<Interval>{{a, b}}, sigma, spec);
}

}  // namespace wetrelay
