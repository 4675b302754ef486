#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "wetrelay/common.hpp"
#include "wetrelay/quadrature.hpp"

namespace wetrelay {

/// Discrete-input AWGN channel on a fixed level grid with cached emission
/// tables. Quadrature nodes are Gauss-Legendre panels tiling the merged
/// clusters around the levels, so widely separated supports stay cheap.
class DiscreteAwgn {
 public:
  DiscreteAwgn(std::vector<double> levels, double noise_var, double trunc_sigmas = 10.0,
               double panel_sigmas = 2.0)
      : x_(std::move(levels)), sigma2_(noise_var), sigma_(std::sqrt(noise_var)) {
    if (!(noise_var > 0)) throw ConfigError("DiscreteAwgn: noise_var must be > 0");
    if (x_.empty()) throw ConfigError("DiscreteAwgn: empty level grid");
    std::sort(x_.begin(), x_.end());
    build_nodes(trunc_sigmas, panel_sigmas);
    const size_t K = x_.size(), J = y_.size();
    if (K * J > size_t{12'000'000})
      throw SolverError("DiscreteAwgn: emission table too large; coarsen the grid");
    logphi_.resize(K * J);
    phiw_.resize(K * J);
    d0_.assign(K, 0.0);
    const double lognorm = -std::log(sigma_) - 0.5 * std::log(2.0 * M_PI);
    for (size_t k = 0; k < K; ++k) {
      double acc = 0.0;
      for (size_t j = 0; j < J; ++j) {
        const double z = (y_[j] - x_[k]) / sigma_;
        const double lp = lognorm - 0.5 * z * z;
        logphi_[k * J + j] = lp;
        const double pw = std::exp(lp) * w_[j];
        phiw_[k * J + j] = pw;
        acc += pw * lp;
      }
      d0_[k] = acc;
    }
    hz_nats_ = 0.5 * std::log(2.0 * M_PI * M_E * sigma2_);
  }

  const std::vector<double>& levels() const { return x_; }
  size_t input_count() const { return x_.size(); }
  size_t node_count() const { return y_.size(); }
  double noise_var() const { return sigma2_; }
  double noise_entropy_nats() const { return hz_nats_; }

  /// Output density at the quadrature nodes.
  std::vector<double> output_density(const std::vector<double>& p) const {
    const size_t K = x_.size(), J = y_.size();
    std::vector<double> py(J, 0.0);
    for (size_t k = 0; k < K; ++k) {
      const double pk = p[k];
      if (pk <= 0.0) continue;
      const double* lp = &logphi_[k * J];
      for (size_t j = 0; j < J; ++j) py[j] += pk * std::exp(lp[j]);
    }
    return py;
  }

  /// Information densities D_k = KL(phi_k || p_Y) in nats. Stable against
  /// output-density underflow (log-sum-exp on the affected nodes).
  std::vector<double> info_densities(const std::vector<double>& p) const {
    const size_t K = x_.size(), J = y_.size();
    const std::vector<double> py = output_density(p);
    std::vector<double> lpy(J);
    std::vector<uint32_t> bad;
    for (size_t j = 0; j < J; ++j) {
      if (py[j] > 1e-250) {
        lpy[j] = std::log(py[j]);
      } else {
        bad.push_back(static_cast<uint32_t>(j));
        lpy[j] = 0.0;
      }
    }
    if (!bad.empty()) {
      std::vector<double> lp(K);
      for (size_t k = 0; k < K; ++k) lp[k] = p[k] > 0 ? std::log(p[k]) : -1e300;
      for (uint32_t j : bad) {
        double best = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k < K; ++k)
          if (p[k] > 0) best = std::max(best, lp[k] + logphi_[k * J + j]);
        double acc = 0.0;
        for (size_t k = 0; k < K; ++k)
          if (p[k] > 0) acc += std::exp(lp[k] + logphi_[k * J + j] - best);
        lpy[j] = best + std::log(acc);
      }
    }
    std::vector<double> D(K);
    for (size_t k = 0; k < K; ++k) {
      const double* pw = &phiw_[k * J];
      double acc = 0.0;
      for (size_t j = 0; j < J; ++j) acc += pw[j] * lpy[j];
      D[k] = d0_[k] - acc;
    }
    return D;
  }

  double output_entropy_nats(const std::vector<double>& py) const {
    double h = 0.0;
    for (size_t j = 0; j < y_.size(); ++j) {
      const double v = py[j];
      if (v > 0.0) h -= w_[j] * v * std::log(v);
    }
    return h;
  }

  double mutual_information_bits(const std::vector<double>& p) const {
    return std::max(0.0, (output_entropy_nats(output_density(p)) - hz_nats_) / kLn2);
  }

  /// d^T phi at the nodes, for line searches along sparse directions.
  std::vector<double> direction_density(const std::vector<std::pair<size_t, double>>& d) const {
    const size_t J = y_.size();
    std::vector<double> dphi(J, 0.0);
    for (const auto& [k, dk] : d) {
      const double* lp = &logphi_[k * J];
      for (size_t j = 0; j < J; ++j) dphi[j] += dk * std::exp(lp[j]);
    }
    return dphi;
  }

  /// Maximize lin_slope*g + w_ent*h_out(py + g*dphi) over g in [0, gmax]
  /// by bisection on the (decreasing) derivative.
  double line_search(const std::vector<double>& py, const std::vector<double>& dphi,
                     double lin_slope, double w_ent, double gmax) const {
    auto deriv = [&](double g) {
      double s = 0.0;
      for (size_t j = 0; j < y_.size(); ++j) {
        const double v = std::max(py[j] + g * dphi[j], 1e-300);
        s -= w_[j] * dphi[j] * (std::log(v) + 1.0);
      }
      return lin_slope + w_ent * s;
    };
    if (deriv(gmax) >= 0.0) return gmax;
    if (deriv(0.0) <= 0.0) return 0.0;
    double lo = 0.0, hi = gmax;
    for (int i = 0; i < 60; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (deriv(mid) > 0.0)
        lo = mid;
      else
        hi = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  void build_nodes(double trunc_sigmas, double panel_sigmas) {
    std::vector<Interval> clusters = merged_clusters(x_, trunc_sigmas * sigma_);
    using gl = boost::math::quadrature::gauss<double, 15>;
    const auto& absc = gl::abscissa();
    const auto& wts = gl::weights();
    for (const auto& iv : clusters) {
      const int panels =
          std::max(1, static_cast<int>(std::ceil((iv.b - iv.a) / (panel_sigmas * sigma_))));
      const double h = (iv.b - iv.a) / panels;
      for (int p = 0; p < panels; ++p) {
        const double mid = iv.a + (p + 0.5) * h;
        const double half = 0.5 * h;
        y_.push_back(mid + half * absc[0]);
        w_.push_back(half * wts[0]);
        for (size_t i = 1; i < absc.size(); ++i) {
          y_.push_back(mid - half * absc[i]);
          w_.push_back(half * wts[i]);
          y_.push_back(mid + half * absc[i]);
          w_.push_back(half * wts[i]);
        }
      }
    }
  }

  std::vector<double> x_;
  double sigma2_, sigma_;
  std::vector<double> y_, w_;
  std::vector<double> logphi_, phiw_, d0_;
  double hz_nats_ = 0.0;
};

/// A polytope vertex supported on at most two levels.
struct FwVertex {
  int i = -1;
  int j = -1;       // unused when the vertex is a single level
  double wi = 1.0;  // mass on i; (1 - wi) sits on j

  bool operator<(const FwVertex& o) const {
    if (i != o.i) return i < o.i;
    return j < o.j;
  }
  bool operator==(const FwVertex& o) const { return i == o.i && j == o.j; }
};

struct FwResult {
  std::vector<double> p;
  double value_nats = 0.0;  // w_ent*(h_out - h_noise) + lin^T p
  double gap_nats = 0.0;    // Frank-Wolfe certificate: opt <= value + gap
  int iterations = 0;
  bool converged = false;
};

/// Pairwise Frank-Wolfe for  max  lin^T p + w_ent * I_nats(p)  over a
/// polytope given by its linear-maximization oracle. Iterates stay exactly
/// feasible; the FW gap upper-bounds the remaining suboptimality.
inline FwResult fw_maximize(const DiscreteAwgn& ch, const std::vector<double>& lin,
                            double w_ent,
                            const std::function<std::pair<FwVertex, double>(
                                const std::vector<double>&)>& lmo,
                            double tol_nats, int max_iters,
                            std::map<FwVertex, double>* warm_active = nullptr) {
  const size_t K = ch.input_count();
  auto fill = [&](const FwVertex& v, std::vector<std::pair<size_t, double>>& out, double scale) {
    if (v.j < 0 || v.j == v.i) {
      out.emplace_back(static_cast<size_t>(v.i), scale);
    } else {
      out.emplace_back(static_cast<size_t>(v.i), scale * v.wi);
      out.emplace_back(static_cast<size_t>(v.j), scale * (1.0 - v.wi));
    }
  };
  auto vertex_score = [&](const FwVertex& v, const std::vector<double>& g) {
    return (v.j < 0 || v.j == v.i) ? g[v.i] : g[v.i] * v.wi + g[v.j] * (1.0 - v.wi);
  };

  std::map<FwVertex, double> active;
  std::vector<double> p(K, 0.0);
  if (warm_active && !warm_active->empty()) {
    active = *warm_active;
    double tot = 0.0;
    for (auto& [v, wt] : active) tot += wt;
    for (auto& [v, wt] : active) {
      wt /= tot;
      std::vector<std::pair<size_t, double>> sp;
      fill(v, sp, wt);
      for (auto& [k, m] : sp) p[k] += m;
    }
  } else {
    std::vector<double> g0(lin);
    {
      std::vector<double> uni(K, 1.0 / K);
      const auto D = ch.info_densities(uni);
      for (size_t k = 0; k < K; ++k) g0[k] += w_ent * D[k];
    }
    const auto [v0, s0] = lmo(g0);
    active[v0] = 1.0;
    std::vector<std::pair<size_t, double>> sp;
    fill(v0, sp, 1.0);
    for (auto& [k, m] : sp) p[k] += m;
  }

  std::vector<double> py = ch.output_density(p);
  FwResult res;
  double gap = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < max_iters; ++it) {
    const auto D = ch.info_densities(p);
    std::vector<double> g(K);
    for (size_t k = 0; k < K; ++k) g[k] = lin[k] + w_ent * D[k];
    const auto [vf, fbest] = lmo(g);
    double gp = 0.0;
    for (size_t k = 0; k < K; ++k) gp += g[k] * p[k];
    gap = fbest - gp;
    if (gap < tol_nats) {
      res.converged = true;
      break;
    }
    // away vertex: worst active vertex under the current gradient
    FwVertex va;
    double aw_val = std::numeric_limits<double>::infinity();
    for (const auto& [v, wt] : active) {
      const double s = vertex_score(v, g);
      if (s < aw_val) {
        aw_val = s;
        va = v;
      }
    }
    bool pairwise = vertex_score(vf, g) > aw_val && active.size() >= 1 && !(vf == va);
    std::vector<std::pair<size_t, double>> dir;
    double gmax = 1.0;
    double lin_slope = 0.0;
    if (pairwise) {
      fill(vf, dir, 1.0);
      fill(va, dir, -1.0);
      gmax = active[va];
    } else {
      fill(vf, dir, 1.0);
      for (size_t k = 0; k < K; ++k)
        if (p[k] != 0.0) dir.emplace_back(k, -p[k]);
      gmax = 1.0;
    }
    for (auto& [k, dk] : dir) lin_slope += lin[k] * dk;
    const auto dphi = ch.direction_density(dir);
    const double gam = ch.line_search(py, dphi, lin_slope, w_ent, gmax);
    if (gam <= 0.0) {
      if (pairwise) {
        // away direction exhausted; retry a plain FW step next round by
        // dropping the away vertex weight floor
        active.erase(va);
        if (active.empty()) active[vf] = 0.0;
        continue;
      }
      res.converged = gap < tol_nats;
      break;
    }
    for (auto& [k, dk] : dir) p[k] = std::max(0.0, p[k] + gam * dk);
    for (size_t j = 0; j < dphi.size(); ++j) py[j] += gam * dphi[j];
    if (pairwise) {
      active[va] -= gam;
      if (active[va] <= 1e-14) active.erase(va);
      active[vf] += gam;
    } else {
      for (auto& [v, wt] : active) wt *= (1.0 - gam);
      active[vf] += gam;
      for (auto iter = active.begin(); iter != active.end();) {
        if (iter->second <= 1e-14)
          iter = active.erase(iter);
        else
          ++iter;
      }
    }
    if ((it & 63) == 63) py = ch.output_density(p);  // refresh accumulated drift
  }
  res.p = std::move(p);
  double linp = 0.0;
  for (size_t k = 0; k < K; ++k) linp += lin[k] * res.p[k];
  res.value_nats = linp + w_ent * (ch.output_entropy_nats(ch.output_density(res.p)) -
                                   ch.noise_entropy_nats());
  res.gap_nats = gap;
  res.iterations = it;
  if (warm_active) *warm_active = active;
  return res;
}

}  // namespace wetrelay
