#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "wetrelay/batteryless.hpp"
#include "wetrelay/channel.hpp"
#include "wetrelay/grid_channel.hpp"
#include "wetrelay/mi.hpp"
#include "wetrelay/numeric.hpp"
#include "wetrelay/types.hpp"

namespace wetrelay {

struct CostConstrainedConfig {
  double grid_extent = 0.0;   // amplitude; 0 = cost-aware default
  int grid_points = 401;      // odd, symmetric, 0 always a grid point
  double budget_tolerance = 0.0;  // Watt; 0 = 1e-6 * budget
  double convergence_tolerance = 1e-7;  // bits, Frank-Wolfe certificate target
  int max_iterations = 6000;
  double prune_threshold = 1e-9;

  void validate() const {
    if (grid_points < 3 || grid_points % 2 == 0)
      throw ConfigError("source grid_points must be odd and >= 3");
    if (!(convergence_tolerance > 0)) throw ConfigError("convergence_tolerance must be > 0");
    if (max_iterations < 1) throw ConfigError("max_iterations must be >= 1");
  }
};

/// Energy drawn from the battery for one source symbol: 0 for the silent
/// symbol, x^2 + P_C otherwise.
inline double source_symbol_cost(double x_S, double P_C) {
  return x_S == 0.0 ? 0.0 : x_S * x_S + P_C;
}

struct CostConstrainedSolution {
  MassPointDistribution dist;
  double capacity_bits = 0.0;
  double duality_gap_bits = 0.0;  // FW certificate: optimum <= capacity + gap
  double budget_error = 0.0;      // |E[cost] - budget|, Watt
  double multiplier = 0.0;        // nats per Watt, recovered at the optimum
  int iterations = 0;
  bool converged = true;
};

/// max I(X_S;Y_R) over grid distributions with E[P_S(X_S)] = budget, by
/// pairwise Frank-Wolfe on the equality polytope (iterates meet the budget
/// exactly; the FW gap certifies remaining suboptimality).
inline CostConstrainedSolution solve_cost_constrained_capacity(
    double sigma_R_sq, double budget, double P_C, const CostConstrainedConfig& cfg = {}) {
  cfg.validate();
  if (!(sigma_R_sq > 0)) throw ConfigError("sigma_R_sq must be > 0");
  if (!(budget >= 0)) throw ConfigError("budget must be >= 0");
  if (!(P_C >= 0)) throw ConfigError("P_C must be >= 0");
  CostConstrainedSolution out;
  if (budget == 0.0) {
    out.dist = MassPointDistribution::point_mass(0.0);
    return out;
  }

  double extent = cfg.grid_extent;
  if (extent <= 0.0) {
    double u_c = 0.0;
    if (P_C > 0.0) {
      // cost-efficiency point of the Gaussian-capacity proxy
      auto eff = [&](double lu) {
        const double uu = std::exp(lu);
        return 0.5 * std::log1p(uu / sigma_R_sq) / kLn2 / (uu + P_C);
      };
      const auto m = golden_max(eff, std::log(sigma_R_sq * 1e-3),
                                std::log(std::max(P_C, sigma_R_sq) * 1e4), 200);
      u_c = std::exp(m.first);
    }
    extent = 6.0 * std::max(std::sqrt(budget), std::sqrt(u_c));
  }
  const int half = (cfg.grid_points - 1) / 2;
  std::vector<double> x;
  for (int i = half; i >= 1; --i) x.push_back(-extent * i / half);
  x.push_back(0.0);
  for (int i = 1; i <= half; ++i) x.push_back(extent * i / half);

  std::vector<double> cost(x.size());
  for (size_t k = 0; k < x.size(); ++k) cost[k] = source_symbol_cost(x[k], P_C);
  const double min_cost = *std::min_element(cost.begin(), cost.end());
  const double max_cost = *std::max_element(cost.begin(), cost.end());
  if (budget > max_cost)
    throw ConfigError("budget exceeds the maximum per-symbol cost on the grid");
  if (budget < min_cost && min_cost > 0.0)
    throw ConfigError("budget below the minimum per-symbol cost on the grid");

  DiscreteAwgn chan(x, sigma_R_sq);
  const auto& lv = chan.levels();
  for (size_t k = 0; k < lv.size(); ++k) cost[k] = source_symbol_cost(lv[k], P_C);

  std::vector<size_t> lo_idx, hi_idx;
  for (size_t k = 0; k < lv.size(); ++k) {
    if (cost[k] <= budget) lo_idx.push_back(k);
    if (cost[k] >= budget) hi_idx.push_back(k);
  }
  auto lmo = [&](const std::vector<double>& g) -> std::pair<FwVertex, double> {
    FwVertex best;
    double val = -std::numeric_limits<double>::infinity();
    for (size_t i : lo_idx) {
      if (cost[i] == budget) {
        if (g[i] > val) {
          val = g[i];
          best = {static_cast<int>(i), -1, 1.0};
        }
        continue;
      }
      for (size_t j : hi_idx) {
        if (cost[j] <= cost[i]) continue;
        const double wi = (cost[j] - budget) / (cost[j] - cost[i]);
        const double v = wi * g[i] + (1.0 - wi) * g[j];
        if (v > val) {
          val = v;
          best = {static_cast<int>(i), static_cast<int>(j), wi};
        }
      }
    }
    return {best, val};
  };

  std::vector<double> lin(lv.size(), 0.0);
  const double tol_nats = cfg.convergence_tolerance * kLn2;
  const auto fw = fw_maximize(chan, lin, 1.0, lmo, tol_nats, cfg.max_iterations, nullptr);

  out.capacity_bits = std::max(0.0, fw.value_nats / kLn2);
  out.duality_gap_bits = fw.gap_nats / kLn2;
  out.iterations = fw.iterations;
  out.converged = fw.converged;
  double w = 0.0;
  for (size_t k = 0; k < lv.size(); ++k) w += fw.p[k] * cost[k];
  out.budget_error = std::fabs(w - budget);
  const double btol = cfg.budget_tolerance > 0.0 ? cfg.budget_tolerance : 1e-6 * budget;
  if (out.budget_error > btol)
    throw SolverError("cost-constrained solver left the budget surface", out.budget_error);

  // cost multiplier at the optimum: slope of the best off-silent exchange
  {
    const auto D = chan.info_densities(fw.p);
    size_t k0 = std::lower_bound(lv.begin(), lv.end(), 0.0) - lv.begin();
    double s = 0.0;
    for (size_t k = 0; k < lv.size(); ++k)
      if (cost[k] > 0.0) s = std::max(s, (D[k] - D[k0]) / cost[k]);
    out.multiplier = s;
  }

  out.dist = MassPointDistribution::from_arrays(lv, fw.p);
  out.dist.canonicalize(0.0, cfg.prune_threshold);
  // canonicalize renormalizes nothing; keep exact masses, only pruned
  double tot = 0.0;
  for (auto& mp : out.dist.points) tot += mp.prob;
  for (auto& mp : out.dist.points) mp.prob /= tot;
  return out;
}

/// Lemma-3 capacity for the unlimited-battery source: the smaller of the
/// cost-constrained source-relay capacity and the Gaussian relay-destination
/// capacity.
inline CapacityResult capacity_unlimited_battery(const NormalizedChannel& ch,
                                                 const SystemParams& p,
                                                 const CostConstrainedConfig& cfg = {},
                                                 int relay_points = 129) {
  p.validate();
  CapacityResult res;
  res.case_tag = CaseTag::kUnlimitedBattery;
  if (p.P_R == 0.0) {
    res.relay_dist = MassPointDistribution::point_mass(0.0);
    res.source_dists[0.0] = MassPointDistribution::point_mass(0.0);
    res.bottleneck = Bottleneck::kSourceRelay;
    return res;
  }
  const double budget = p.eta * ch.h_RS_sq * p.P_R;
  const auto src = solve_cost_constrained_capacity(ch.sigma_R_sq, budget, p.P_C, cfg);
  const double rd = gaussian_capacity(p.P_R, ch.sigma_D_sq);
  const double bits = std::min(src.capacity_bits, rd);
  res.capacity_bits_per_symbol = bits;
  res.capacity_bits_per_sec = 2.0 * p.B * bits;
  res.bottleneck = src.capacity_bits <= rd ? Bottleneck::kSourceRelay
                                           : Bottleneck::kRelayDestination;
  res.relay_dist = detail::discretize_gaussian(p.P_R, relay_points);
  res.source_dists[0.0] = src.dist;
  res.diag.duality_gap_bits = src.duality_gap_bits;
  res.diag.lambda = src.multiplier;
  res.diag.iterations = src.iterations;
  res.diag.converged = src.converged;
  res.diag.support_size = static_cast<int>(src.dist.size());
  return res;
}

}  // namespace wetrelay
