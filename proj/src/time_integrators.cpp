#include "plsim/time_integrators.hpp"

#include <cmath>
#include <string>

#include "flat_flow.hpp"

namespace plsim {

Field dispersion_half_step(const Field& field, double dt) {
  const bool was_physical = field.is_physical();
  Field spec = to_spectral(field);
  const auto k = spec.grid().wavenumbers();
  for (std::size_t m = 0; m < spec.size(); ++m)
    spec[m] *= std::polar(1.0, -0.5 * k[m] * k[m] * dt);
  return was_physical ? transform(spec, Direction::inverse) : spec;
}

Field cgpe_local_step(const Field& u, double dt, const CgpeParams& p) {
  if (!u.is_physical())
    throw std::invalid_argument("cgpe_local_step: u must be physical");
  Field out = u;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double rho0_sq = std::norm(u[j]);
    if (rho0_sq == 0.0) continue;
    const auto flow = detail::flat_flow(rho0_sq, dt, p.xi, p.sigma);
    out[j] = u[j] * (std::sqrt(flow.rho_sq / rho0_sq) *
                     std::polar(1.0, flow.phase_shift));
  }
  return out;
}

CgpeState strang_step_cgpe(const CgpeState& s, double dt, const CgpeParams& p) {
  Field u = dispersion_half_step(s.u, dt);
  u = cgpe_local_step(to_physical(u), dt, p);
  u = dispersion_half_step(u, dt);
  const double t = s.t + dt;
  if (!u.all_finite()) throw BlowUp(t, "non-finite condensate field");
  return {std::move(u), t};
}

RealField reservoir_exact_update(const RealField& n, const Field& u_frozen,
                                 double dt, const EpParams& p) {
  if (!(n.grid() == u_frozen.grid()) || !(n.grid() == p.pump.grid()))
    throw std::invalid_argument("reservoir_exact_update: grid mismatch");
  const Field u = to_physical(u_frozen);
  RealField out = n;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double gamma = p.R * std::norm(u[j]) + p.beta;
    const double decay = std::exp(-gamma * dt);
    // (1 - e^{-G dt})/G computed without cancellation.
    const double relax = -std::expm1(-gamma * dt) / gamma;
    out[j] = n[j] * decay + p.pump[j] * relax;
  }
  return out;
}

Field ep_condensate_local_step(const Field& u, const RealField& n, double dt,
                               const EpParams& p) {
  if (!u.is_physical())
    throw std::invalid_argument("ep_condensate_local_step: u must be physical");
  Field out = u;
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double rho0_sq = std::norm(u[j]);
    const double c = p.R * n[j] - p.alpha;
    const auto flow = detail::frozen_reservoir_flow(rho0_sq, n[j], dt, p.g,
                                                    p.lambda, p.R, p.alpha);
    out[j] = u[j] * (std::exp(c * dt) * std::polar(1.0, flow.phase_shift));
  }
  return out;
}

EpState strang_step_ep(const EpState& s, double dt, const EpParams& p) {
  Field u = to_physical(dispersion_half_step(s.u, dt));
  RealField n = reservoir_exact_update(s.n, u, 0.5 * dt, p);
  u = ep_condensate_local_step(u, n, dt, p);
  n = reservoir_exact_update(n, u, 0.5 * dt, p);
  u = dispersion_half_step(u, dt);
  const double t = s.t + dt;
  if (!u.all_finite() || !n.all_finite())
    throw BlowUp(t, "non-finite state");
  return {std::move(u), std::move(n), t};
}

std::size_t step_count(double dt, double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (!(t_end >= dt))
    throw std::invalid_argument("integrate: t_end must be at least dt");
  return static_cast<std::size_t>(std::llround(t_end / dt));
}

namespace {

void record(DiagnosticsSeries& d, const CgpeState& s) { d.append(s.t, s.u); }
void record(DiagnosticsSeries& d, const EpState& s) { d.append(s.t, s.u, s.n); }

CgpeState advance(const CgpeState& s, double dt, const CgpeParams& p) {
  return strang_step_cgpe(s, dt, p);
}
EpState advance(const EpState& s, double dt, const EpParams& p) {
  return strang_step_ep(s, dt, p);
}

template <class State, class Params>
Trajectory<State> integrate_impl(const State& initial, double dt, double t_end,
                                 const Params& p,
                                 const IntegrateOptions& options) {
  if (options.sample_every < 1)
    throw std::invalid_argument("integrate: sample_every must be >= 1");
  const std::size_t steps = step_count(dt, t_end);

  Trajectory<State> traj;
  traj.dt = dt;
  State state = initial;
  state.u = to_physical(state.u);
  record(traj.diagnostics, state);
  if (options.keep_states) traj.states.push_back(state);
  const double mass0 = traj.diagnostics.mass.front();
  const double mass_limit = options.mass_growth_limit * std::max(mass0, 1e-300);

  for (std::size_t step = 1; step <= steps; ++step) {
    try {
      state = advance(state, dt, p);
    } catch (const BlowUp& e) {
      traj.blow_up = BlowUpEvent{e.time(), e.what()};
      break;
    }
    // Times are step multiples so samples do not accumulate round-off.
    state.t = initial.t + static_cast<double>(step) * dt;
    traj.steps = step;
    if (mass0 > 0.0 && mass_of(state.u) > mass_limit) {
      traj.blow_up = BlowUpEvent{state.t, "mass exceeded growth limit"};
      break;
    }
    if (step % options.sample_every == 0) {
      record(traj.diagnostics, state);
      if (options.keep_states) traj.states.push_back(state);
    }
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace

Trajectory<CgpeState> integrate(const CgpeState& initial, double dt,
                                double t_end, const CgpeParams& p,
                                const IntegrateOptions& options) {
  return integrate_impl(initial, dt, t_end, p, options);
}

Trajectory<EpState> integrate(const EpState& initial, double dt, double t_end,
                              const EpParams& p,
                              const IntegrateOptions& options) {
  return integrate_impl(initial, dt, t_end, p, options);
}

}  // namespace plsim
