#pragma once

#include <cmath>

#include "wetrelay/common.hpp"

namespace wetrelay {

/// Physical scenario. All fields in SI units (Watt, Hz, meter).
struct SystemParams {
  double f_c_down = 2.3999e9;  // relay -> source/destination carrier, Hz
  double f_c_up = 2.4001e9;    // source -> relay carrier, Hz
  double d_SR = 10.0;          // m
  double d_RD = 200.0;         // m
  double alpha = 3.0;          // path-loss exponent
  double eta = 0.8;            // harvest efficiency, in (0,1)
  double P_C = 1e-3;           // energy transmission cost, W
  double P_R = 1.0;            // relay average power, W
  double B = 1e5;              // bandwidth, Hz
  double N0 = 1e-19;           // noise power density, W/Hz

  void validate() const {
    if (!(f_c_down > 0) || !(f_c_up > 0)) throw ConfigError("carrier frequencies must be > 0");
    if (!(d_SR > 0) || !(d_RD > 0)) throw ConfigError("distances must be > 0");
    if (!(alpha >= 2.0)) throw ConfigError("path-loss exponent must be >= 2");
    if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0,1)");
    if (!(P_C >= 0.0)) throw ConfigError("P_C must be >= 0");
    if (!(P_R >= 0.0)) throw ConfigError("P_R must be >= 0");  // P_R == 0 short-circuits to zero capacity
    if (!(B > 0) || !(N0 > 0)) throw ConfigError("B and N0 must be > 0");
  }
};

/// Effective channel after normalizing the received symbols by the link gains;
/// the AWGN enters downstream only through these equivalent variances.
struct NormalizedChannel {
  double sigma_R_sq = 0.0;  // N0*B / h_SR^2
  double sigma_D_sq = 0.0;  // N0*B / h_RD^2
  double h_SR_sq = 0.0;
  double h_RS_sq = 0.0;
  double h_RD_sq = 0.0;
};

/// Free-space reference path loss with exponent alpha: (c/(4*pi*f_c))^2 * d^-alpha.
inline double path_loss_gain(double f_c, double d, double alpha) {
  if (!(f_c > 0)) throw ConfigError("path_loss_gain: f_c must be > 0");
  if (!(d > 0)) throw ConfigError("path_loss_gain: d must be > 0");
  const double amp = kSpeedOfLight / (f_c * 4.0 * M_PI);
  return amp * amp * std::pow(d, -alpha);
}

inline NormalizedChannel build_normalized_channel(const SystemParams& p) {
  p.validate();
  NormalizedChannel ch;
  ch.h_SR_sq = path_loss_gain(p.f_c_up, p.d_SR, p.alpha);
  ch.h_RS_sq = path_loss_gain(p.f_c_down, p.d_SR, p.alpha);
  ch.h_RD_sq = path_loss_gain(p.f_c_down, p.d_RD, p.alpha);
  const double raw_noise = p.N0 * p.B;
  ch.sigma_R_sq = raw_noise / ch.h_SR_sq;
  ch.sigma_D_sq = raw_noise / ch.h_RD_sq;
  return ch;
}

/// Energy harvested by the source during one symbol interval, E_H = eta*h_RS^2*x_R^2.
inline double harvest_energy(double x_R, double eta, double h_RS_sq) {
  return eta * h_RS_sq * x_R * x_R;
}

/// Usable transmit energy f(x_R) = max(0, E_H(x_R) - P_C).
inline double usable_energy(double x_R, double eta, double h_RS_sq, double P_C) {
  return std::max(0.0, harvest_energy(x_R, eta, h_RS_sq) - P_C);
}

inline double usable_energy(double x_R, const NormalizedChannel& ch, const SystemParams& p) {
  return usable_energy(x_R, p.eta, ch.h_RS_sq, p.P_C);
}

}  // namespace wetrelay
