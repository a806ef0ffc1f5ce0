#pragma once

// Strang-split steppers. Every substep is an exact flow:
//   * dispersion: multiplier exp(-i k^2 dt) in Fourier space,
//   * cGPE local part: logistic amplitude and logarithmic phase,
//   * reservoir: affine ODE in n with u frozen,
//   * EP condensate local part: exponential amplitude with n frozen.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "plsim/diagnostics.hpp"
#include "plsim/model_dynamics.hpp"

namespace plsim {

struct CgpeState {
  Field u;
  double t = 0.0;
};

struct EpState {
  Field u;
  RealField n;
  double t = 0.0;
};

/// Raised by a step whose output is non-finite.
class BlowUp : public std::runtime_error {
 public:
  BlowUp(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// exp(i (dt/2) d_xx): multiplies mode k by exp(-i k^2 dt / 2). Any sign of
/// dt; the result keeps the input representation.
Field dispersion_half_step(const Field& field, double dt);

/// Exact flow over dt of du/dt = -i|u|^2 u + (xi - sigma|u|^2) u, pointwise.
Field cgpe_local_step(const Field& u, double dt, const CgpeParams& p);

CgpeState strang_step_cgpe(const CgpeState& s, double dt, const CgpeParams& p);

/// n <- n e^{-G dt} + (P/G)(1 - e^{-G dt}),  G = R|u|^2 + beta.
RealField reservoir_exact_update(const RealField& n, const Field& u_frozen,
                                 double dt, const EpParams& p);

/// Exact flow of the non-dispersive condensate equation with n frozen.
Field ep_condensate_local_step(const Field& u, const RealField& n, double dt,
                               const EpParams& p);

EpState strang_step_ep(const EpState& s, double dt, const EpParams& p);

struct BlowUpEvent {
  double time;
  std::string reason;
};

template <class State>
struct Trajectory {
  std::vector<State> states;  // empty unless requested
  DiagnosticsSeries diagnostics;
  double dt = 0.0;
  std::size_t steps = 0;  // steps actually taken
  std::optional<BlowUpEvent> blow_up;
  std::optional<State> final_state;  // last state reached
};

struct IntegrateOptions {
  std::size_t sample_every = 1;
  bool keep_states = false;
  /// Blow-up is declared when the mass exceeds this multiple of its
  /// initial value.
  double mass_growth_limit = 1e6;
};

/// Advances round(t_end/dt) steps, sampling at step 0 and every
/// sample_every steps. Blow-up stops integration and keeps the samples
/// recorded so far.
Trajectory<CgpeState> integrate(const CgpeState& initial, double dt,
                                double t_end, const CgpeParams& p,
                                const IntegrateOptions& options = {});

Trajectory<EpState> integrate(const EpState& initial, double dt, double t_end,
                              const EpParams& p,
                              const IntegrateOptions& options = {});

/// Number of steps used by integrate() for the given dt and t_end.
std::size_t step_count(double dt, double t_end);

}  // namespace plsim
