#pragma once

// Picard iteration on the Duhamel (integral) form of both models over a
// uniform time mesh on [0, delta]:
//
//   u(t) = S(t) u0 + int_0^t S(t - tau) F(u(tau)) dtau,   S(t) = e^{i t d_xx}
//   n(t) = n0 + int_0^t (P - R|u|^2 n - beta n) dtau      (EP reservoir)
//
// Time integrals use the trapezoidal rule on the mesh. Distances between
// iterates are sup over mesh nodes of the spatial H^s (resp. L^2) norm.

#include <cstddef>
#include <vector>

#include "plsim/model_dynamics.hpp"

namespace plsim {

struct TimeMesh {
  double delta;
  std::vector<double> nodes;  // uniform, nodes.front() == 0, back() == delta

  std::size_t size() const { return nodes.size(); }
  double spacing() const { return delta / static_cast<double>(nodes.size() - 1); }
};

/// Throws std::invalid_argument unless delta > 0 and n_nodes >= 3.
TimeMesh make_time_mesh(double delta, std::size_t n_nodes);

struct PicardOptions {
  /// Iteration stops once an iterate distance falls below
  /// stop_tolerance * (1 + |u0|).
  double stop_tolerance = 1e-13;
  /// Keep every iterate; otherwise only the first and the last.
  bool keep_all_iterates = true;
};

struct IterateHistory {
  /// iterates[m][j] is iterate m at mesh node j (physical representation).
  std::vector<std::vector<Field>> iterates;
  /// Reservoir iterates, EP runs only.
  std::vector<std::vector<RealField>> reservoir_iterates;
  std::vector<double> diffs;
  double initial_norm = 0.0;  // |u0| (plus |n0| for EP) in the metric used
  bool diverged = false;

  const std::vector<Field>& last() const { return iterates.back(); }
};

IterateHistory picard_cgpe(const Field& u0, const TimeMesh& mesh,
                           const CgpeParams& p, double s, std::size_t max_iter,
                           const PicardOptions& options = {});

IterateHistory picard_ep(const Field& u0, const RealField& n0,
                         const TimeMesh& mesh, const EpParams& p,
                         std::size_t max_iter,
                         const PicardOptions& options = {});

struct ContractionReport {
  std::vector<double> ratios;  // diffs[m+1] / diffs[m]
  double max_ratio = 0.0;      // largest ratio while diffs are above round-off
  bool converged = false;
  double final_residual = 0.0;
  bool diverged = false;
};

/// Requires at least two distances (three iterates).
ContractionReport contraction_report(const IterateHistory& h);
ContractionReport contraction_report(const std::vector<double>& diffs,
                                     double initial_norm,
                                     bool diverged = false);

struct ExistenceBracket {
  double delta_ok;    // largest tested delta whose iteration converged
  double delta_fail;  // smallest tested delta whose iteration did not
  std::size_t runs;
};

/// Doubling followed by bisection over delta for the cGPE Picard map with a
/// fixed node count and iteration budget. Stops when
/// delta_fail / delta_ok <= target_ratio.
ExistenceBracket bracket_existence_time(const Field& u0, const CgpeParams& p,
                                        double s, std::size_t n_nodes,
                                        std::size_t max_iter,
                                        double delta_start = 0.05,
                                        double target_ratio = 1.25,
                                        double delta_max = 64.0);

}  // namespace plsim
