#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "wetrelay/channel.hpp"
#include "wetrelay/grid_channel.hpp"
#include "wetrelay/lambert.hpp"
#include "wetrelay/mi.hpp"
#include "wetrelay/mi_table.hpp"
#include "wetrelay/numeric.hpp"
#include "wetrelay/types.hpp"

namespace wetrelay {

/// Symmetric amplitude grid for the relay input optimizations.
struct RelayGridSpec {
  double max_amplitude = 0.0;  // 0 = harvest-cost-aware default
  int point_count = 201;       // odd, so 0 is a grid point
  bool symmetric = true;

  void validate(double p_r) const {
    if (point_count < 3 || point_count % 2 == 0)
      throw ConfigError("relay grid point_count must be odd and >= 3");
    if (!symmetric) throw ConfigError("relay grid must be symmetric");
    if (max_amplitude > 0.0 && max_amplitude * max_amplitude < p_r)
      throw ConfigError("relay grid max_amplitude^2 must cover P_R");
  }
};

struct BatterylessOptions {
  RelayGridSpec grid;
  SmithSolverConfig smith;
  QuadratureSpec quad;
  double balance_tol_bits = 1e-6;  // case 3 rate-balance band
  double fw_tol_nats = 3e-9;
  int fw_max_iters = 6000;
  int case2_relay_points = 129;  // Gaussian discretization carried in the result
};

/// max_p(v|x) I(V;Y_R | X_R = x) as a function of the relay amplitude.
inline double relay_state_mi_bits(double x, const NormalizedChannel& ch, const SystemParams& p,
                                  const SmithSolverConfig& cfg, const QuadratureSpec& quad) {
  const double f = usable_energy(x, ch, p);
  return amplitude_capacity_bits(f / ch.sigma_R_sq, cfg, quad);
}

/// Average source-relay mutual information under a relay distribution (Eq. 11 inner sum).
inline double avg_sr_mi(const MassPointDistribution& relay_dist, const NormalizedChannel& ch,
                        const SystemParams& p, const SmithSolverConfig& cfg = {},
                        const QuadratureSpec& quad = {}) {
  relay_dist.validate(1e-9);
  double s = 0.0;
  for (const auto& mp : relay_dist.points)
    s += mp.prob * relay_state_mi_bits(mp.value, ch, p, cfg, quad);
  return s;
}

namespace detail {

struct LpSolution {
  double value = 0.0;
  // up to two (u = x^2, mass) support atoms
  std::vector<std::pair<double, double>> atoms;
};

/// Exact LP max sum g_k p_k s.t. sum u_k p_k <= budget on the simplex:
/// the optimum uses at most two u-atoms (single with slack, or a tight pair).
inline LpSolution simplex_power_lp(const std::vector<double>& g, const std::vector<double>& u,
                                   double budget) {
  LpSolution best;
  best.value = -1.0;
  const size_t n = g.size();
  for (size_t k = 0; k < n; ++k) {
    if (u[k] <= budget && g[k] > best.value) {
      best.value = g[k];
      best.atoms = {{u[k], 1.0}};
    }
  }
  for (size_t i = 0; i < n; ++i) {
    if (u[i] >= budget) continue;
    for (size_t j = 0; j < n; ++j) {
      if (u[j] <= budget) continue;
      const double wi = (u[j] - budget) / (u[j] - u[i]);
      const double val = wi * g[i] + (1.0 - wi) * g[j];
      if (val > best.value) {
        best.value = val;
        best.atoms = {{u[i], wi}, {u[j], 1.0 - wi}};
      }
    }
  }
  if (best.value < 0.0) throw SolverError("power LP infeasible on the given grid");
  return best;
}

inline MassPointDistribution atoms_to_symmetric_dist(
    const std::vector<std::pair<double, double>>& atoms) {
  MassPointDistribution d;
  for (const auto& [u, mass] : atoms) {
    if (mass <= 0.0) continue;
    if (u <= 0.0) {
      d.points.push_back({0.0, mass});
    } else {
      const double x = std::sqrt(u);
      d.points.push_back({-x, 0.5 * mass});
      d.points.push_back({x, 0.5 * mass});
    }
  }
  d.canonicalize(0.0, 0.0);
  return d;
}

}  // namespace detail

/// Harvest-cost-aware symmetric relay grid; always contains 0 and +/-sqrt(P_R).
inline std::vector<double> make_relay_grid(const NormalizedChannel& ch, const SystemParams& p,
                                           const RelayGridSpec& spec) {
  spec.validate(p.P_R);
  double max_amp = spec.max_amplitude;
  std::optional<double> x0;
  const double a = p.eta * ch.h_RS_sq;
  if (p.P_C > 0.0) {
    // efficiency point of the high-snr surrogate; extends the grid when the
    // optimum sits far beyond sqrt(P_R)
    const double s = M_PI * M_E * ch.sigma_R_sq;
    const double q = 2.0 * p.P_C - s;
    if (q != 0.0) {
      const double w0 = lambert_w(LambertBranch::kPrincipal, q / (M_E * s));
      if (w0 != 0.0) {
        const double x0sq = (q / (2.0 * a)) * (1.0 + 1.0 / w0);
        if (x0sq > 0.0 && std::isfinite(x0sq)) x0 = std::sqrt(x0sq);
      }
    }
  }
  if (max_amp <= 0.0) {
    max_amp = 4.0 * std::sqrt(p.P_R);
    if (x0) max_amp = std::max(max_amp, 1.5 * *x0);
  }
  const int half = (spec.point_count - 1) / 2;
  std::vector<double> pos;
  for (int i = 1; i <= half; ++i) pos.push_back(max_amp * i / half);
  const double rt = std::sqrt(p.P_R);
  if (rt > 0.0 && rt < max_amp) pos.push_back(rt);
  if (x0 && *x0 < max_amp) pos.push_back(*x0);
  std::sort(pos.begin(), pos.end());
  pos.erase(std::unique(pos.begin(), pos.end(),
                        [](double a_, double b_) { return std::fabs(a_ - b_) < 1e-12 * b_; }),
            pos.end());
  std::vector<double> grid;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) grid.push_back(-*it);
  grid.push_back(0.0);
  for (double v : pos) grid.push_back(v);
  return grid;
}

/// Case 1: maximize the average source-relay rate alone (linear program).
inline std::pair<MassPointDistribution, double> solve_case1(const std::vector<double>& grid,
                                                            const NormalizedChannel& ch,
                                                            const SystemParams& p,
                                                            const SmithSolverConfig& cfg = {},
                                                            const QuadratureSpec& quad = {}) {
  std::vector<double> u, g;
  for (double x : grid) {
    if (x < 0.0) continue;
    u.push_back(x * x);
    g.push_back(relay_state_mi_bits(x, ch, p, cfg, quad));
  }
  const auto lp = detail::simplex_power_lp(g, u, p.P_R);
  return {detail::atoms_to_symmetric_dist(lp.atoms), lp.value};
}

struct Case2Check {
  bool holds = false;
  double lhs_bits = 0.0;  // Gaussian relay-destination capacity
  double rhs_bits = 0.0;  // average source-relay rate under a Gaussian relay input
};

/// Case 2 test: is the relay-destination link the bottleneck even under the
/// Gaussian relay input that is optimal for it?
inline Case2Check check_case2(const NormalizedChannel& ch, const SystemParams& p,
                              const QuadratureSpec& quad = {},
                              const SmithSolverConfig& cfg = {}) {
  Case2Check out;
  out.lhs_bits = gaussian_capacity(p.P_R, ch.sigma_D_sq);
  const double rt = std::sqrt(p.P_R);
  const double upper = quad.truncation_sigmas * rt;
  const double a = p.eta * ch.h_RS_sq;
  const double x_on = p.P_C > 0.0 ? std::sqrt(p.P_C / a) : 0.0;
  if (x_on < upper) {
    auto integrand = [&](double x) {
      const double pdf = std::exp(-0.5 * x * x / p.P_R) / std::sqrt(2.0 * M_PI * p.P_R);
      return 2.0 * pdf * relay_state_mi_bits(x, ch, p, cfg, quad);
    };
    const double span = upper - x_on;
    out.rhs_bits = integrate_clusters(integrand, {{x_on, upper}},
                                      std::min(rt, span) / 16.0, quad);
  }
  out.holds = out.lhs_bits < out.rhs_bits;
  return out;
}

struct Case3Solution {
  MassPointDistribution dist;
  double value_bits = 0.0;
  double sr_rate_bits = 0.0;
  double rd_rate_bits = 0.0;
  double alpha = 0.5;
  double lambda = 0.0;
  double xi = 0.0;
  double kkt_residual_bits = 0.0;
  double balance_gap_bits = 0.0;
  int iterations = 0;
};

/// Case 3: balance the two hops. Bisection on the Appendix-C weight alpha with
/// a pairwise Frank-Wolfe inner solve of the concave weighted program.
inline Case3Solution solve_case3(const std::vector<double>& grid, const NormalizedChannel& ch,
                                 const SystemParams& p, const BatterylessOptions& opt = {}) {
  const size_t K = grid.size();
  std::vector<double> g_nats(K), u(K);
  for (size_t k = 0; k < K; ++k) {
    u[k] = grid[k] * grid[k];
    g_nats[k] = relay_state_mi_bits(grid[k], ch, p, opt.smith, opt.quad) * kLn2;
  }
  DiscreteAwgn chan(grid, ch.sigma_D_sq);
  const auto& x = chan.levels();
  // levels() is sorted; rebuild u/g in its order
  std::vector<double> uu(K), gg(K);
  for (size_t k = 0; k < K; ++k) {
    uu[k] = x[k] * x[k];
    gg[k] = amplitude_capacity_bits(usable_energy(x[k], ch, p) / ch.sigma_R_sq, opt.smith,
                                    opt.quad) * kLn2;
  }

  auto lmo_for = [&](const std::vector<double>& scores) -> std::pair<FwVertex, double> {
    FwVertex best;
    double val = -std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < K; ++k)
      if (uu[k] <= p.P_R && scores[k] > val) {
        val = scores[k];
        best = {static_cast<int>(k), -1, 1.0};
      }
    for (size_t i = 0; i < K; ++i) {
      if (uu[i] >= p.P_R) continue;
      for (size_t j = 0; j < K; ++j) {
        if (uu[j] <= p.P_R) continue;
        const double wi = (uu[j] - p.P_R) / (uu[j] - uu[i]);
        const double v = wi * scores[i] + (1.0 - wi) * scores[j];
        if (v > val) {
          val = v;
          best = {static_cast<int>(i), static_cast<int>(j), wi};
        }
      }
    }
    return {best, val};
  };

  std::map<FwVertex, double> warm;
  auto solve_alpha = [&](double alpha) {
    std::vector<double> lin(K);
    for (size_t k = 0; k < K; ++k) lin[k] = alpha * gg[k];
    return fw_maximize(chan, lin, 1.0 - alpha, lmo_for, opt.fw_tol_nats, opt.fw_max_iters,
                       &warm);
  };

  auto rates_of = [&](const std::vector<double>& pvec) {
    double sr = 0.0;
    for (size_t k = 0; k < K; ++k) sr += pvec[k] * gg[k];
    return std::make_pair(sr / kLn2, chan.mutual_information_bits(pvec));
  };

  Case3Solution sol;
  double lo = 0.0, hi = 1.0;
  FwResult cur = solve_alpha(0.0);
  auto [sr0, rd0] = rates_of(cur.p);
  int iters = cur.iterations;
  double best_val = -1.0;
  auto consider = [&](const FwResult& r, double alpha) {
    const auto [sr, rd] = rates_of(r.p);
    const double v = std::min(sr, rd);
    if (v > best_val) {
      best_val = v;
      sol.value_bits = v;
      sol.sr_rate_bits = sr;
      sol.rd_rate_bits = rd;
      sol.alpha = alpha;
      sol.dist = MassPointDistribution::from_arrays(x, r.p);
      sol.dist.canonicalize(0.0, 1e-9);
    }
  };
  consider(cur, 0.0);
  if (sr0 - rd0 < 0.0) {  // even the best RD-rate point is SR-limited: interior balance exists
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      cur = solve_alpha(mid);
      iters += cur.iterations;
      const auto [sr, rd] = rates_of(cur.p);
      consider(cur, mid);
      const double gap = sr - rd;
      if (std::fabs(gap) <= opt.balance_tol_bits) break;
      if (gap > 0.0)
        hi = mid;
      else
        lo = mid;
    }
  }
  sol.balance_gap_bits = std::fabs(sol.sr_rate_bits - sol.rd_rate_bits);
  sol.iterations = iters;

  // recover (lambda, xi) from the alpha-weighted stationarity on the support
  {
    std::vector<double> pfull(K, 0.0);
    for (const auto& mp : sol.dist.points) {
      const auto it = std::lower_bound(x.begin(), x.end(), mp.value - 1e-15);
      if (it != x.end()) pfull[it - x.begin()] = mp.prob;
    }
    const auto D = chan.info_densities(pfull);
    std::vector<size_t> supp;
    for (size_t k = 0; k < K; ++k)
      if (pfull[k] > 1e-9) supp.push_back(k);
    // least squares for stat_k = lambda*u_k + xi over the support
    double suu = 0, su = 0, s1 = 0, suv = 0, sv = 0;
    for (size_t k : supp) {
      const double stat = sol.alpha * gg[k] + (1.0 - sol.alpha) * (D[k] - 1.0);
      suu += uu[k] * uu[k];
      su += uu[k];
      s1 += 1.0;
      suv += uu[k] * stat;
      sv += stat;
    }
    const double det = suu * s1 - su * su;
    if (std::fabs(det) > 1e-30 && supp.size() >= 2) {
      sol.lambda = (suv * s1 - sv * su) / det;
      sol.xi = (suu * sv - su * suv) / det;
    } else if (!supp.empty()) {
      sol.lambda = 0.0;
      sol.xi = sv / s1;
    }
    double resid = 0.0;
    for (size_t k : supp) {
      const double stat = sol.alpha * gg[k] + (1.0 - sol.alpha) * (D[k] - 1.0);
      resid = std::max(resid, std::fabs(stat - sol.lambda * uu[k] - sol.xi));
    }
    sol.kkt_residual_bits = resid / kLn2;
  }
  return sol;
}

struct Corollary2Point {
  double x0 = 0.0;
  double lambda = 0.0;
  int branch = 0;  // 0 principal, -1 minus-one
  double residual_bits = 0.0;
};

/// Closed-form Case-2 constants of Corollary 2 (Eqs. 27-28); the Lambert
/// branch is picked by verifying the stationarity condition.
inline Corollary2Point corollary2_x0_lambda(const NormalizedChannel& ch,
                                            const SystemParams& p) {
  const double a = p.eta * ch.h_RS_sq;
  const double s = M_PI * M_E * ch.sigma_R_sq;
  const double q = 2.0 * p.P_C - s;
  if (q == 0.0) throw SolverError("corollary2: degenerate 2*P_C == e*pi*sigma_R^2");
  const double w0 = lambert_w(LambertBranch::kPrincipal, q / (M_E * s));
  const double lam = a * w0 / (q * kLn2);
  if (!(lam > 0.0) || !std::isfinite(lam))
    throw SolverError("corollary2: multiplier not positive");
  // inner Lambert argument, in log space (analytically equal to -1/e)
  const double log_mag = std::log(s * lam * kLn2 / a) + (lam / a) * q * kLn2;
  if (log_mag > 700.0) throw SolverError("corollary2: inner Lambert argument overflow");
  const double z = -std::exp(log_mag);

  auto g_of = [&](double x0sq) {
    return 0.5 * std::log1p(2.0 * (a * x0sq - p.P_C) / (M_PI * M_E * ch.sigma_R_sq)) / kLn2;
  };
  Corollary2Point best;
  double best_resid = std::numeric_limits<double>::infinity();
  std::string fail;
  for (int branch = 0; branch >= -1; --branch) {
    double w;
    try {
      w = lambert_w(branch == 0 ? LambertBranch::kPrincipal : LambertBranch::kMinusOne, z);
    } catch (const std::exception& e) {
      fail += std::string(e.what()) + "; ";
      continue;
    }
    const double x0sq = q / (2.0 * a) - w / (2.0 * lam * kLn2);
    if (!(x0sq > p.P_C / a) || !std::isfinite(x0sq)) {
      fail += "branch " + std::to_string(branch) + ": x0^2 infeasible; ";
      continue;
    }
    const double resid = std::fabs(g_of(x0sq) - lam * x0sq);
    if (resid < best_resid) {
      best_resid = resid;
      best = {std::sqrt(x0sq), lam, branch, resid};
    }
  }
  if (!(best_resid <= 1e-8))
    throw SolverError("corollary2: no Lambert branch verifies the stationarity condition (" +
                          fail + ")",
                      best_resid);
  return best;
}

namespace detail {

/// Equal-probability quantile discretization of N(0, var); E[x^2] <= var.
inline MassPointDistribution discretize_gaussian(double var, int n) {
  MassPointDistribution d;
  const double sd = std::sqrt(var);
  for (int i = 0; i < n; ++i) {
    const double q = (i + 0.5) / n;
    d.points.push_back({sd * std::sqrt(2.0) * boost::math::erf_inv(2.0 * q - 1.0), 1.0 / n});
  }
  d.canonicalize(0.0, 0.0);
  return d;
}

}  // namespace detail

/// Theorem-1 dispatcher for the batteryless source, with the Corollary-2
/// closed forms as certified fast paths.
inline CapacityResult capacity_batteryless(const NormalizedChannel& ch, const SystemParams& p,
                                           const BatterylessOptions& opt = {}) {
  p.validate();
  CapacityResult res;
  auto finish = [&](double bits) {
    res.capacity_bits_per_symbol = bits;
    res.capacity_bits_per_sec = 2.0 * p.B * bits;
    res.diag.support_size = static_cast<int>(res.relay_dist.size());
    for (const auto& mp : res.relay_dist.points) {
      const double f = usable_energy(mp.value, ch, p);
      if (res.source_dists.count(mp.value)) continue;
      if (f <= 0.0) {
        res.source_dists[mp.value] = MassPointDistribution::point_mass(0.0);
      } else {
        res.source_dists[mp.value] =
            max_mi_amplitude_constrained(f, ch.sigma_R_sq, opt.smith, opt.quad).dist;
      }
    }
    return res;
  };

  if (p.P_R == 0.0) {
    res.relay_dist = MassPointDistribution::point_mass(0.0);
    res.case_tag = CaseTag::kCase1;
    res.bottleneck = Bottleneck::kSourceRelay;
    return finish(0.0);
  }

  const double a = p.eta * ch.h_RS_sq;
  const double pie_sig = M_PI * M_E * ch.sigma_R_sq;

  // Corollary-2 candidates (high-snr closed forms), both KKT structures.
  struct Cand {
    double value = -1.0;
    bool certified = false;
  };
  Cand c1, c2;
  Corollary2Point cor2{};
  bool have_cor2 = false;
  if (a * p.P_R > p.P_C) {
    c1.value = 0.5 * std::log1p(2.0 * (a * p.P_R - p.P_C) / pie_sig) / kLn2;
    c1.certified = (a * p.P_R - p.P_C) / ch.sigma_R_sq > opt.smith.high_snr_threshold;
  }
  if (p.P_C > 0.0) {
    try {
      cor2 = corollary2_x0_lambda(ch, p);
      have_cor2 = true;
      const double x0sq = cor2.x0 * cor2.x0;
      if (p.P_R <= x0sq) {  // three-point masses valid
        c2.value = cor2.lambda * p.P_R;
        c2.certified = (a * x0sq - p.P_C) / ch.sigma_R_sq > opt.smith.high_snr_threshold;
      }
    } catch (const SolverError&) {
      have_cor2 = false;  // degenerate corner; the general path covers it
    }
  }

  if (c1.certified && c1.value >= c2.value) {
    const double rhs = mi_bpsk_exact(p.P_R / ch.sigma_D_sq, opt.quad);
    if (c1.value < rhs) {
      const double rt = std::sqrt(p.P_R);
      res.relay_dist = MassPointDistribution::from_arrays({-rt, rt}, {0.5, 0.5});
      res.case_tag = CaseTag::kCor2Case1;
      res.bottleneck = Bottleneck::kSourceRelay;
      return finish(c1.value);
    }
  }
  if (c2.certified && c2.value > std::max(0.0, c1.value)) {
    const double x0sq = cor2.x0 * cor2.x0;
    const double m = p.P_R / (2.0 * x0sq);
    MassPointDistribution three = MassPointDistribution::from_arrays(
        {-cor2.x0, 0.0, cor2.x0}, {m, 1.0 - 2.0 * m, m});
    const double rhs = mi_discrete_awgn(three, ch.sigma_D_sq, opt.quad);
    if (c2.value < rhs) {
      res.relay_dist = three;
      res.case_tag = CaseTag::kCor2Case2;
      res.bottleneck = Bottleneck::kSourceRelay;
      res.diag.lambda = cor2.lambda;
      res.diag.lambert_branch = cor2.branch;
      res.diag.kkt_residual_bits = cor2.residual_bits;
      return finish(c2.value);
    }
  }

  // General Theorem-1 path on the amplitude grid.
  const auto grid = make_relay_grid(ch, p, opt.grid);
  auto [p1, case1_bits] = solve_case1(grid, ch, p, opt.smith, opt.quad);
  const double id_p1 = mi_discrete_awgn(p1, ch.sigma_D_sq, opt.quad);
  if (case1_bits <= id_p1) {
    res.relay_dist = p1;
    res.case_tag = CaseTag::kCase1;
    res.bottleneck = Bottleneck::kSourceRelay;
    return finish(case1_bits);
  }
  const auto chk = check_case2(ch, p, opt.quad, opt.smith);
  if (chk.holds) {
    res.relay_dist = detail::discretize_gaussian(p.P_R, opt.case2_relay_points);
    res.case_tag = CaseTag::kCase2;
    res.bottleneck = Bottleneck::kRelayDestination;
    return finish(chk.lhs_bits);
  }
  const auto c3 = solve_case3(grid, ch, p, opt);
  res.relay_dist = c3.dist;
  res.case_tag = CaseTag::kCase3;
  res.bottleneck = Bottleneck::kBalanced;
  res.diag.alpha = c3.alpha;
  res.diag.lambda = c3.lambda;
  res.diag.xi = c3.xi;
  res.diag.kkt_residual_bits = c3.kkt_residual_bits;
  res.diag.balance_gap_bits = c3.balance_gap_bits;
  res.diag.iterations = c3.iterations;
  return finish(c3.value_bits);
}

/// Deterministic per-fading-state rate allocation (Eqs. 22-23); silent states
/// carry zero rate, epsilon is spread over the active-state probability.
inline CodingPlan rate_allocation(const CapacityResult& result, const NormalizedChannel& ch,
                                  const SystemParams& p, double epsilon,
                                  const SmithSolverConfig& cfg = {},
                                  const QuadratureSpec& quad = {}) {
  const double C = result.capacity_bits_per_symbol;
  if (!(epsilon > 0.0) || !(epsilon < C))
    throw ConfigError("rate_allocation: epsilon must satisfy 0 < epsilon < C");
  CodingPlan plan;
  plan.epsilon = epsilon;
  plan.relay_rate_R_R = C - epsilon;
  double avg = 0.0, p_active = 0.0;
  std::map<double, double> g;
  for (const auto& mp : result.relay_dist.points) {
    g[mp.value] = relay_state_mi_bits(mp.value, ch, p, cfg, quad);
    avg += mp.prob * g[mp.value];
    if (g[mp.value] > 0.0) p_active += mp.prob;
  }
  if (!(avg > 0.0) || !(p_active > 0.0))
    throw SolverError("rate_allocation: no active fading states");
  plan.scaling_Q = C / avg;
  const double eps_prime = epsilon / p_active;
  for (const auto& mp : result.relay_dist.points)
    plan.per_state_rates[mp.value] = g[mp.value] > 0.0 ? plan.scaling_Q * g[mp.value] - eps_prime
                                                       : 0.0;
  return plan;
}

}  // namespace wetrelay
