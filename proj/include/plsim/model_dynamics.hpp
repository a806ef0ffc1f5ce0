#pragma once

// Parameters and right-hand sides of the two condensate models:
//
//   cGPE:  du/dt = i u_xx - i|u|^2 u + (xi - sigma |u|^2) u
//   EP:    du/dt = i u_xx - i g|u|^2 u - i lambda n u + (R n - alpha) u
//          dn/dt = P - (R |u|^2 + beta) n
//
// together with closed-form spatially homogeneous solutions used as oracles.

#include <optional>
#include <utility>

#include "plsim/spectral_grid.hpp"

namespace plsim {

struct CgpeParams {
  double xi = 1.0;     // linear gain
  double sigma = 1.0;  // nonlinear saturation

  /// Throws std::invalid_argument unless xi > 0 and sigma > 0.
  void validate() const;
};

struct EpParams {
  double g = 1.0;
  double lambda = 1.0;
  double R = 1.0;
  double alpha = 1.0;
  double beta = 1.0;
  RealField pump;

  /// Throws std::invalid_argument on non-positive constants or a pump that
  /// is negative or non-finite somewhere.
  void validate() const;

  /// Value of the pump when it is the same at every grid point.
  std::optional<double> constant_pump() const;
};

/// Time derivative of the cGPE. The Laplacian is spectral and the
/// nonlinear part is 2/3-dealiased. Input must be physical.
Field cgpe_rhs(const Field& u, const CgpeParams& p);

/// Time derivatives (du/dt, dn/dt) of the EP system.
std::pair<Field, RealField> ep_rhs(const Field& u, const RealField& n,
                                   const EpParams& p);

/// Spatially flat cGPE solution rho(t) exp(i theta(t)) from amplitude rho0
/// and phase theta0. Valid for xi, sigma >= 0 (zero values use the limits).
cplx cgpe_flat_closed_form(double rho0, double theta0, double t,
                           const CgpeParams& p);

struct HomogeneousState {
  double amplitude_sq;  // |u*|^2
  double n_star;
  double omega;  // u(t) = |u*| exp(-i omega t)
};

/// Stationary homogeneous condensate of the EP system for a constant pump.
/// Returns nullopt at or below threshold P0 <= alpha beta / R. Throws
/// std::invalid_argument if the pump is not constant.
std::optional<HomogeneousState> ep_homogeneous_fixed_point(const EpParams& p);

}  // namespace plsim
