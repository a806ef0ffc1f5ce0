#pragma once

// A priori bounds of the global theory checked against sampled diagnostics.
//
// Every check returns a CheckReport whose worst_margin is the smallest slack
// (bound minus observed value, or minus |residual| for identities) over all
// samples, and passed <=> worst_margin >= -tolerance.

#include <string>
#include <vector>

#include "plsim/diagnostics.hpp"
#include "plsim/model_dynamics.hpp"

namespace plsim {

struct CheckReport {
  std::string name;
  bool passed = false;
  double worst_margin = 0.0;
  double location = 0.0;  // time of the worst margin
  double tolerance = 0.0;
  std::vector<CheckReport> parts;  // sub-checks, if any
};

/// Mass balance d/dt M - 2 xi M + 2 sigma int|u|^4 = 0 with a second-order
/// finite-difference derivative (third order at the two ends). The tolerance of each sample is a Richardson
/// estimate from the residual on every second sample nearby. `slack_scale`
/// multiplies the tolerance. Throws std::invalid_argument with fewer than 4
/// samples or non-uniform sampling.
CheckReport f1_residual(const DiagnosticsSeries& d, const CgpeParams& p,
                        double slack_scale = 1.0);

/// Centered/one-sided second-order residual of the mass balance at each
/// sample (exposed for convergence studies).
std::vector<double> f1_residual_series(const DiagnosticsSeries& d,
                                       const CgpeParams& p);

/// M0 e^{-2 xi t} + (2 xi / sigma) |T| (1 - e^{-2 xi t}).
double abs_set_envelope_value(double mass0, double t, const CgpeParams& p,
                              double domain_measure);

/// mass(t) <= envelope(t) + 1e-8 (1 + envelope(t)) at every sample.
CheckReport abs_set_envelope(const DiagnosticsSeries& d, const CgpeParams& p,
                             double domain_measure, double slack_scale = 1.0);

/// e^{-gamma t}(L0 - S/gamma) + S/gamma with gamma = min(2 alpha, beta).
double lyapunov_envelope_value(double l0, double t, double pump_integral,
                               double gamma);
double lyapunov_rate(const EpParams& p);

/// L(t) = mass/2 + int n below the exponential envelope, absolute slack
/// 1e-8. Throws std::domain_error if the initial reservoir is negative.
CheckReport ep_lyapunov(const DiagnosticsSeries& d, const EpParams& p,
                        double slack_scale = 1.0);

/// e^{-beta t} N2_0 + (1 - e^{-beta t}) int P^2 / beta^2.
double reservoir_second_moment_envelope(double n_sq0, double t,
                                        double pump_sq_integral, double beta);

/// (a) n_min >= -1e-12 at every sample and (b) int n^2 below the integrated
/// pointwise bound with absolute slack 1e-8. Throws std::invalid_argument if
/// reservoir columns are missing.
CheckReport reservoir_bounds(const DiagnosticsSeries& d, const EpParams& p,
                             double slack_scale = 1.0);

/// Names accepted by run_check: f1, abs_set, lyapunov, reservoir.
const std::vector<std::string>& check_names();
bool is_cgpe_check(const std::string& name);

}  // namespace plsim
