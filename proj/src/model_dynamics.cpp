#include "plsim/model_dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "flat_flow.hpp"

namespace plsim {

namespace {

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " must be positive");
}

}  // namespace

void CgpeParams::validate() const {
  require_positive(xi, "xi");
  require_positive(sigma, "sigma");
}

void EpParams::validate() const {
  require_positive(g, "g");
  require_positive(lambda, "lambda");
  require_positive(R, "R");
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  for (double v : pump.values()) {
    if (!(v >= 0.0) || !std::isfinite(v))
      throw std::invalid_argument("pump must be finite and nonnegative");
  }
}

std::optional<double> EpParams::constant_pump() const {
  const auto v = pump.values();
  for (double x : v) {
    if (x != v.front()) return std::nullopt;
  }
  return v.front();
}

Field cgpe_rhs(const Field& u, const CgpeParams& p) {
  if (!u.is_physical())
    throw std::invalid_argument("cgpe_rhs: u must be physical");
  const Grid1D& grid = u.grid();
  const cplx i{0.0, 1.0};

  Field nonlinear = Field::zeros(grid);
  for (std::size_t j = 0; j < u.size(); ++j)
    nonlinear[j] = -(i + p.sigma) * std::norm(u[j]) * u[j];
  Field out = dealias(transform(nonlinear, Direction::forward));

  const Field u_hat = transform(u, Direction::forward);
  const auto k = grid.wavenumbers();
  for (std::size_t m = 0; m < out.size(); ++m)
    out[m] += (-i * k[m] * k[m] + p.xi) * u_hat[m];
  return transform(out, Direction::inverse);
}

std::pair<Field, RealField> ep_rhs(const Field& u, const RealField& n,
                                   const EpParams& p) {
  if (!u.is_physical())
    throw std::invalid_argument("ep_rhs: u must be physical");
  if (!(u.grid() == n.grid()) || !(u.grid() == p.pump.grid()))
    throw std::invalid_argument("ep_rhs: grid mismatch");
  const Grid1D& grid = u.grid();
  const cplx i{0.0, 1.0};

  Field nonlinear = Field::zeros(grid);
  RealField dn = RealField::zeros(grid);
  for (std::size_t j = 0; j < u.size(); ++j) {
    const double rho2 = std::norm(u[j]);
    nonlinear[j] = (-i * (p.g * rho2 + p.lambda * n[j]) + p.R * n[j]) * u[j];
    dn[j] = p.pump[j] - (p.R * rho2 + p.beta) * n[j];
  }
  Field du = dealias(transform(nonlinear, Direction::forward));

  const Field u_hat = transform(u, Direction::forward);
  const auto k = grid.wavenumbers();
  for (std::size_t m = 0; m < du.size(); ++m)
    du[m] += (-i * k[m] * k[m] - p.alpha) * u_hat[m];
  return {transform(du, Direction::inverse), std::move(dn)};
}

cplx cgpe_flat_closed_form(double rho0, double theta0, double t,
                           const CgpeParams& p) {
  const detail::FlatFlow flow = detail::flat_flow(rho0 * rho0, t, p.xi, p.sigma);
  return std::polar(std::sqrt(flow.rho_sq), theta0 + flow.phase_shift);
}

std::optional<HomogeneousState> ep_homogeneous_fixed_point(const EpParams& p) {
  const auto pump = p.constant_pump();
  if (!pump) throw std::invalid_argument("fixed point needs a constant pump");
  const double threshold = p.alpha * p.beta / p.R;
  if (*pump <= threshold) return std::nullopt;
  HomogeneousState s;
  s.n_star = p.alpha / p.R;
  s.amplitude_sq = *pump / p.alpha - p.beta / p.R;
  s.omega = p.g * s.amplitude_sq + p.lambda * s.n_star;
  return s;
}

}  // namespace plsim
