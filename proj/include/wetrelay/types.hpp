#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "wetrelay/common.hpp"

namespace wetrelay {

struct MassPoint {
  double value = 0.0;
  double prob = 0.0;
};

/// Finite probability law on the real line. Canonical form keeps values
/// strictly increasing with duplicates merged and zero-mass points dropped.
struct MassPointDistribution {
  std::vector<MassPoint> points;

  static MassPointDistribution point_mass(double v) { return {{{v, 1.0}}}; }

  static MassPointDistribution from_arrays(const std::vector<double>& values,
                                           const std::vector<double>& probs) {
    if (values.size() != probs.size())
      throw ConfigError("mass point arrays differ in length");
    MassPointDistribution d;
    d.points.reserve(values.size());
    for (size_t i = 0; i < values.size(); ++i) d.points.push_back({values[i], probs[i]});
    d.canonicalize();
    return d;
  }

  void canonicalize(double merge_eps = 0.0, double prune = 1e-15) {
    std::sort(points.begin(), points.end(),
              [](const MassPoint& a, const MassPoint& b) { return a.value < b.value; });
    std::vector<MassPoint> out;
    for (const auto& p : points) {
      if (!out.empty() &&
          std::fabs(p.value - out.back().value) <=
              merge_eps * std::max(1.0, std::fabs(p.value))) {
        out.back().prob += p.prob;
      } else {
        out.push_back(p);
      }
    }
    points.clear();
    for (const auto& p : out)
      if (p.prob > prune) points.push_back(p);
    if (points.empty()) points.push_back({0.0, 1.0});
  }

  void validate(double tol = 1e-12) const {
    double sum = 0.0;
    for (size_t i = 0; i < points.size(); ++i) {
      if (points[i].prob < 0) throw ConfigError("negative probability mass");
      if (i > 0 && points[i].value <= points[i - 1].value)
        throw ConfigError("mass point values not strictly increasing");
      sum += points[i].prob;
    }
    if (std::fabs(sum - 1.0) > tol)
      throw ConfigError("probabilities sum to " + std::to_string(sum));
  }

  size_t size() const { return points.size(); }

  double power() const {
    double s = 0.0;
    for (const auto& p : points) s += p.prob * p.value * p.value;
    return s;
  }

  /// p(v) == p(-v) after canonicalization, within tol on matched pairs.
  bool is_symmetric(double tol = 1e-9) const {
    size_t i = 0, j = points.size();
    while (i < j) {
      --j;
      if (i == j) {
        if (std::fabs(points[i].value) > tol * std::max(1.0, std::fabs(points[i].value)))
          return false;
        break;
      }
      if (std::fabs(points[i].value + points[j].value) >
              tol * std::max(1.0, std::fabs(points[j].value)) ||
          std::fabs(points[i].prob - points[j].prob) > tol)
        return false;
      ++i;
    }
    return true;
  }
};

enum class CaseTag {
  kCase1,
  kCase2,
  kCase3,
  kCor2Case1,
  kCor2Case2,
  kUnlimitedBattery,  // min-of-two-links result for the battery-equipped source
};

enum class Bottleneck { kSourceRelay, kRelayDestination, kBalanced };

inline std::string to_string(CaseTag t) {
  switch (t) {
    case CaseTag::kCase1: return "Case1";
    case CaseTag::kCase2: return "Case2";
    case CaseTag::kCase3: return "Case3";
    case CaseTag::kCor2Case1: return "Cor2Case1";
    case CaseTag::kCor2Case2: return "Cor2Case2";
    case CaseTag::kUnlimitedBattery: return "Unlimited";
  }
  return "?";
}

inline std::string to_string(Bottleneck b) {
  switch (b) {
    case Bottleneck::kSourceRelay: return "source-relay";
    case Bottleneck::kRelayDestination: return "relay-destination";
    case Bottleneck::kBalanced: return "balanced";
  }
  return "?";
}

/// Extra per-solve facts surfaced by the diagnose command.
struct CaseDiagnostics {
  double kkt_residual_bits = 0.0;
  double balance_gap_bits = 0.0;     // case 3: |avg SR rate - RD rate|
  double alpha = 0.0;                // case 3 weighting multiplier
  double lambda = 0.0;               // power / stationarity multiplier
  double xi = 0.0;                   // normalization multiplier
  int lambert_branch = 0;            // 0 principal, -1 minus-one (Cor2 Case 2)
  int support_size = 0;
  double duality_gap_bits = 0.0;     // battery solver certificate
  int iterations = 0;
  bool converged = true;
};

struct CapacityResult {
  double capacity_bits_per_symbol = 0.0;
  double capacity_bits_per_sec = 0.0;  // 2*B*capacity_bits_per_symbol
  CaseTag case_tag = CaseTag::kCase1;
  MassPointDistribution relay_dist;
  // Optimal p*(v_S | x_R) keyed by relay amplitude; values live in [-1, 1].
  // For the unlimited-battery source the single entry (key 0.0) is p*(x_S).
  std::map<double, MassPointDistribution> source_dists;
  Bottleneck bottleneck = Bottleneck::kSourceRelay;
  CaseDiagnostics diag;
};

/// Deterministic rate-allocation arithmetic of the fading-state coding scheme.
struct CodingPlan {
  double epsilon = 0.0;
  std::map<double, double> per_state_rates;  // relay amplitude -> R_S(x_R)
  double scaling_Q = 1.0;
  double relay_rate_R_R = 0.0;
};

}  // namespace wetrelay
