#pragma once

#include <cstdint>
#include <random>

#include "plsim/spectral_grid.hpp"

namespace plsim::testing {

inline Field random_field(const Grid1D& grid, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<cplx> v(grid.size());
  for (auto& z : v) z = {normal(rng), normal(rng)};
  return Field(grid, std::move(v));
}

/// Random coefficients on modes |m| <= band, returned in physical space.
inline Field random_band_limited(const Grid1D& grid, long band,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Field spec = Field::zeros(grid, Representation::spectral);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::labs(grid.mode_index(i)) <= band) spec[i] = {normal(rng), normal(rng)};
  }
  return transform(spec, Direction::inverse);
}

/// Band-limited random data rescaled to unit H^s norm.
inline Field random_normalized(const Grid1D& grid, long band, double s,
                               std::mt19937_64& rng) {
  Field u = random_band_limited(grid, band, rng);
  const double norm = hs_norm(u, s);
  for (auto& z : u.values()) z /= norm;
  return u;
}

inline double max_abs_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

inline double max_abs(const Field& a) {
  double m = 0.0;
  for (const auto& z : a.values()) m = std::max(m, std::abs(z));
  return m;
}

}  // namespace plsim::testing
