#pragma once

// Periodic 1-D lattice, unitary spectral transforms and discrete norms.
//
// Spectral coefficients are stored in standard DFT order: mode indices
// 0..N/2-1 followed by -N/2..-1. The forward transform is unitary,
//   c_m = N^{-1/2} sum_j u_j exp(-i k_m x_j),   x_j = j L / N,
// so sum |c_m|^2 = sum |u_j|^2 and continuum integrals are recovered by a
// factor dx = L / N.

#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace plsim {

using cplx = std::complex<double>;

class Grid1D {
 public:
  /// Throws std::invalid_argument unless n_points is even and >= 4 and
  /// length > 0.
  Grid1D(std::size_t n_points, double length);

  std::size_t size() const { return n_points_; }
  double length() const { return length_; }
  double dx() const { return length_ / static_cast<double>(n_points_); }
  double x(std::size_t j) const { return dx() * static_cast<double>(j); }

  /// Physical wavenumbers 2*pi*m/L in DFT order.
  std::span<const double> wavenumbers() const& { return *wavenumbers_; }
  std::span<const double> wavenumbers() const&& = delete;
  double wavenumber(std::size_t i) const { return (*wavenumbers_)[i]; }
  /// Signed integer mode index m of DFT slot i.
  long mode_index(std::size_t i) const;

  bool operator==(const Grid1D& other) const {
    return n_points_ == other.n_points_ && length_ == other.length_;
  }

 private:
  std::size_t n_points_;
  double length_;
  std::shared_ptr<const std::vector<double>> wavenumbers_;
};

Grid1D make_grid(std::size_t n_points, double length);

enum class Representation { physical, spectral };
enum class Direction { forward, inverse };

/// Complex samples on a grid, either point values or unitary coefficients.
class Field {
 public:
  Field(Grid1D grid, std::vector<cplx> values,
        Representation rep = Representation::physical);

  static Field zeros(const Grid1D& grid,
                     Representation rep = Representation::physical);

  template <class F>
  static Field from_function(const Grid1D& grid, F&& f) {
    std::vector<cplx> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
    return Field(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  Representation representation() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::physical; }
  std::size_t size() const { return values_.size(); }

  std::span<const cplx> values() const& { return values_; }
  std::span<cplx> values() & { return values_; }
  std::span<const cplx> values() const&& = delete;
  const cplx& operator[](std::size_t i) const { return values_[i]; }
  cplx& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;

 private:
  Grid1D grid_;
  std::vector<cplx> values_;
  Representation rep_;
};

/// Real samples in physical space (reservoir density, pump profile).
class RealField {
 public:
  RealField(Grid1D grid, std::vector<double> values);

  static RealField zeros(const Grid1D& grid);
  static RealField constant(const Grid1D& grid, double value);

  template <class F>
  static RealField from_function(const Grid1D& grid, F&& f) {
    std::vector<double> v(grid.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = f(grid.x(j));
    return RealField(grid, std::move(v));
  }

  const Grid1D& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const& { return values_; }
  std::span<double> values() & { return values_; }
  std::span<const double> values() const&& = delete;
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  double integral() const;
  double integral_of_square() const;
  double min() const;
  double max() const;
  bool all_finite() const;

 private:
  Grid1D grid_;
  std::vector<double> values_;
};

/// Forward maps physical -> spectral, inverse maps spectral -> physical.
/// Throws std::invalid_argument when the input is already in the target
/// representation.
Field transform(const Field& field, Direction direction);

/// Returns the physical (resp. spectral) version, transforming if needed.
Field to_physical(const Field& field);
Field to_spectral(const Field& field);

/// Zeroes modes with |m| > N/3. Requires spectral representation.
Field dealias(const Field& field);

/// Continuum-scaled H^s norm, (sum <k>^{2s} |c_k|^2 dx)^{1/2}.
double hs_norm(const Field& field, double s);

/// Rectangle-rule L^p norm for p in {2, 4}; physical representation only.
double lp_norm(const Field& field, double p);

/// Japanese bracket (1 + x^2)^{1/2}.
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

namespace fft {

/// Unnormalized in-place complex DFT of length n (sign -1 forward, +1
/// inverse). Plans are cached per (n, sign); safe to call concurrently.
void dft_1d(std::span<cplx> data, int sign);

/// Unnormalized in-place 2-D DFT on row-major data with n_rows x n_cols.
void dft_2d(std::span<cplx> data, std::size_t n_rows, std::size_t n_cols,
            int sign);

}  // namespace fft

}  // namespace plsim
