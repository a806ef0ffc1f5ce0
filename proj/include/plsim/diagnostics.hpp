#pragma once

#include <cstddef>
#include <vector>

#include "plsim/spectral_grid.hpp"

namespace plsim {

/// Scalar diagnostics sampled along a trajectory. The reservoir columns are
/// empty for cGPE runs.
struct DiagnosticsSeries {
  std::vector<double> times;
  std::vector<double> mass;       // integral of |u|^2
  std::vector<double> l4_fourth;  // integral of |u|^4
  std::vector<double> n_integral;
  std::vector<double> n_sq_integral;
  std::vector<double> n_min;

  std::size_t size() const { return times.size(); }
  bool has_reservoir() const { return !n_integral.empty(); }

  /// Throws std::invalid_argument on ragged columns, non-finite entries,
  /// negative mass or non-increasing times.
  void validate() const;

  void append(double t, const Field& u);
  void append(double t, const Field& u, const RealField& n);
};

/// Rectangle-rule integrals of |u|^2 and |u|^4 of a physical field.
double mass_of(const Field& u);
double l4_fourth_of(const Field& u);

}  // namespace plsim
