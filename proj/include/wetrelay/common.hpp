#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace wetrelay {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kLn2 = 0.6931471805599453;

/// Malformed configuration or parameters (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A solver failed to meet its contract (CLI exit code 1).
class SolverError : public std::runtime_error {
 public:
  explicit SolverError(const std::string& msg, double residual = 0.0)
      : std::runtime_error(msg), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// Quadrature refinement exhausted without meeting its tolerance.
class QuadratureError : public SolverError {
 public:
  explicit QuadratureError(const std::string& msg, double residual = 0.0)
      : SolverError(msg, residual) {}
};

inline double log2_safe(double x) { return std::log(x) / kLn2; }

/// log(cosh(z)) without overflow for large |z|.
inline double log_cosh(double z) {
  const double a = std::fabs(z);
  return a + std::log1p(std::exp(-2.0 * a)) - kLn2;
}

}  // namespace wetrelay
