#pragma once

// Closed-form pointwise flows shared by the oracles and the split steppers.

#include <cmath>

namespace plsim::detail {

struct FlatFlow {
  double rho_sq;
  double phase_shift;
};

// log1p(x)/x, continuous at x = 0.
inline double log1p_over_x(double x) {
  return std::abs(x) < 1e-12 ? 1.0 - 0.5 * x : std::log1p(x) / x;
}

// expm1(a t)/a, continuous at a = 0.
inline double expm1_over_rate(double a, double t) {
  return a == 0.0 ? t : std::expm1(a * t) / a;
}

// d(rho^2)/dt = 2(xi - sigma rho^2) rho^2,  d(theta)/dt = -rho^2.
inline FlatFlow flat_flow(double rho0_sq, double t, double xi, double sigma) {
  if (rho0_sq == 0.0) return {0.0, 0.0};
  const double decay = std::exp(-2.0 * xi * t);
  const double q_back = 2.0 * expm1_over_rate(-2.0 * xi, t);  // (1 - e^{-2 xi t})/xi
  const double rho_sq = rho0_sq / (decay + sigma * rho0_sq * q_back);
  double phase;
  if (2.0 * xi * t < 50.0) {
    const double q = 2.0 * expm1_over_rate(2.0 * xi, t);  // (e^{2 xi t} - 1)/xi
    const double x = sigma * rho0_sq * q;
    phase = -0.5 * rho0_sq * q * log1p_over_x(x);
  } else {
    phase = -(2.0 * xi * t + std::log(decay + sigma * rho0_sq * q_back)) /
            (2.0 * sigma);
  }
  return {rho_sq, phase};
}

// Condensate part of the EP system with the reservoir density frozen:
// d(rho^2)/dt = 2(R n - alpha) rho^2,  d(theta)/dt = -(g rho^2 + lambda n).
inline FlatFlow frozen_reservoir_flow(double rho0_sq, double n, double t,
                                      double g, double lambda, double R,
                                      double alpha) {
  const double c = R * n - alpha;
  const double rho_sq = rho0_sq * std::exp(2.0 * c * t);
  const double phase =
      -lambda * n * t - g * rho0_sq * expm1_over_rate(2.0 * c, t);
  return {rho_sq, phase};
}

}  // namespace plsim::detail
