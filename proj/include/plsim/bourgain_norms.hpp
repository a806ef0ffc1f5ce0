#pragma once

// Discrete space-time Fourier analysis on a periodic (x, t) lattice.
//
// A SpaceTimeField holds samples u(x_l, t_j), t_j = j * t_span / n_time,
// stored row-major by time. Before any time transform the samples are
// multiplied by a fixed smooth bump that equals one on the middle half of
// the span and vanishes at its ends; norms are therefore windowed surrogates
// of the continuum norms over t in R.
//
// Transform convention (continuum scaled):
//   u_hat(k, tau) = (1/2pi) sum_{l,j} exp(-i k x_l - i tau t_j) u dx dt,
// so that sum |u|^2 dx dt == sum |u_hat|^2 dk dtau with dk = 2pi/L and
// dtau = 2pi/t_span.

#include <cstdint>
#include <functional>
#include <vector>

#include "plsim/spectral_grid.hpp"

namespace plsim {

enum class TimeWindow { none, smooth_bump };
enum class Dispersion { schroedinger, none };

/// Window profile on [0, 1] in units of the span: exactly 1 for
/// |t/span - 1/2| <= 1/4, exp(1 - 1/(1 - r^2)) taper outside, 0 at the ends.
double bump_window(double unit_time);

class SpaceTimeField {
 public:
  /// values are row-major [n_time][n_points]. Throws on size mismatch,
  /// n_time < 8 or odd, or t_span <= 0.
  SpaceTimeField(Grid1D grid, std::size_t n_time, double t_span,
                 std::vector<cplx> values,
                 TimeWindow window = TimeWindow::none);

  template <class F>
  static SpaceTimeField from_function(const Grid1D& grid, std::size_t n_time,
                                      double t_span, F&& f) {
    std::vector<cplx> v(grid.size() * n_time);
    const double dt = t_span / static_cast<double>(n_time);
    for (std::size_t j = 0; j < n_time; ++j)
      for (std::size_t l = 0; l < grid.size(); ++l)
        v[j * grid.size() + l] = f(grid.x(l), dt * static_cast<double>(j));
    return SpaceTimeField(grid, n_time, t_span, std::move(v));
  }

  /// Stacks snapshots taken at uniform times; t_span = n * spacing.
  static SpaceTimeField from_snapshots(const std::vector<Field>& snapshots,
                                       double spacing);

  const Grid1D& grid() const { return grid_; }
  std::size_t n_time() const { return n_time_; }
  std::size_t n_points() const { return grid_.size(); }
  double t_span() const { return t_span_; }
  double dt() const { return t_span_ / static_cast<double>(n_time_); }
  TimeWindow window() const { return window_; }

  std::span<const cplx> values() const& { return values_; }
  std::span<cplx> values() & { return values_; }
  std::span<const cplx> values() const&& = delete;
  cplx& at(std::size_t time_index, std::size_t space_index) {
    return values_[time_index * grid_.size() + space_index];
  }
  const cplx& at(std::size_t time_index, std::size_t space_index) const {
    return values_[time_index * grid_.size() + space_index];
  }

  /// Copy with the bump applied (idempotent).
  SpaceTimeField windowed() const;

  /// Copy with samples rotated by `shift` lattice points in x.
  SpaceTimeField shifted_in_space(long shift) const;

 private:
  Grid1D grid_;
  std::size_t n_time_;
  double t_span_;
  std::vector<cplx> values_;
  TimeWindow window_;
};

/// Space-time coefficients in DFT order along both axes,
/// row-major [tau index][k index].
struct SpaceTimeSpectrum {
  Grid1D grid;
  std::size_t n_time;
  double t_span;
  std::vector<cplx> coeffs;

  double dk() const;
  double dtau() const;
  double k(std::size_t i) const { return grid.wavenumber(i); }
  double tau(std::size_t j) const;
  cplx& at(std::size_t tau_index, std::size_t k_index) {
    return coeffs[tau_index * grid.size() + k_index];
  }
  const cplx& at(std::size_t tau_index, std::size_t k_index) const {
    return coeffs[tau_index * grid.size() + k_index];
  }

  static SpaceTimeSpectrum zeros(const Grid1D& grid, std::size_t n_time,
                                 double t_span);
};

/// Windows the field (if not yet windowed) and applies the 2-D transform.
SpaceTimeSpectrum spacetime_transform(const SpaceTimeField& f);

double dispersion_symbol(Dispersion d, double k);

/// (sum <k>^{2s} <tau + phi(k)>^{2b} |u_hat|^2 dk dtau)^{1/2}.
double xsb_norm(const SpaceTimeSpectrum& spec, double s, double b, Dispersion d);
double xsb_norm(const SpaceTimeField& f, double s, double b, Dispersion d);

/// (sum_k <k>^{2s} (sum_tau <tau + phi(k)>^{-1} |u_hat| dtau)^2 dk)^{1/2}.
double ys_norm(const SpaceTimeSpectrum& spec, double s, Dispersion d);
double ys_norm(const SpaceTimeField& f, double s, Dispersion d);

/// Cauchy-Schwarz constant C with ys_norm(s) <= C xsb_norm(s, -1/2 + eps)
/// on the lattice of `spec`: C^2 = max_k sum_tau <tau + phi(k)>^{-1-2eps} dtau.
double ys_xsb_constant(const SpaceTimeSpectrum& spec, double eps, Dispersion d);

/// Space-time L^p norm of the windowed samples, p in {2, 4}.
double spacetime_lp_norm(const SpaceTimeField& f, double p);

/// |u|_{L^4} / |u|_{X^{0,3/8}} for the Schroedinger dispersion, both on the
/// windowed field. Throws std::domain_error for a zero field.
double l4_strichartz_ratio(const SpaceTimeField& f);

struct L4EnsembleRow {
  std::size_t n_points;
  std::size_t n_time;
  std::size_t samples;
  std::uint64_t seed;
  double max_ratio;
};

/// Ensemble maximum of l4_strichartz_ratio over windowed free Schroedinger
/// waves sum_{|k| <= n_points/4} c_k exp(i k x - i k^2 t) on L = 2 pi,
/// t_span = 1, with seeded complex Gaussian c_k.
L4EnsembleRow l4_ratio_ensemble(std::size_t n_points, std::size_t n_time,
                                std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Trilinear form.

/// Nonnegative data on a centered (xi, tau) lattice: xi = i d_xi for
/// i in [-n_xi/2, n_xi/2), tau = j d_tau for j in [-n_tau/2, n_tau/2).
class ModeLattice {
 public:
  ModeLattice(std::size_t n_xi, std::size_t n_tau, double d_xi = 1.0,
              double d_tau = 1.0);

  std::size_t n_xi() const { return n_xi_; }
  std::size_t n_tau() const { return n_tau_; }
  double d_xi() const { return d_xi_; }
  double d_tau() const { return d_tau_; }
  long i_min() const { return -static_cast<long>(n_xi_ / 2); }
  long j_min() const { return -static_cast<long>(n_tau_ / 2); }
  bool contains(long i, long j) const {
    return i >= i_min() && i < i_min() + static_cast<long>(n_xi_) &&
           j >= j_min() && j < j_min() + static_cast<long>(n_tau_);
  }
  double xi(long i) const { return d_xi_ * static_cast<double>(i); }
  double tau(long j) const { return d_tau_ * static_cast<double>(j); }

  double& at(long i, long j) { return values_[index(i, j)]; }
  double at(long i, long j) const { return values_[index(i, j)]; }
  std::span<const double> values() const& { return values_; }
  std::span<double> values() & { return values_; }
  std::span<const double> values() const&& = delete;

  /// (sum v^2 d_xi d_tau)^{1/2}.
  double l2_norm() const;
  bool same_lattice(const ModeLattice& o) const {
    return n_xi_ == o.n_xi_ && n_tau_ == o.n_tau_ && d_xi_ == o.d_xi_ &&
           d_tau_ == o.d_tau_;
  }

 private:
  std::size_t index(long i, long j) const {
    return static_cast<std::size_t>(j - j_min()) * n_xi_ +
           static_cast<std::size_t>(i - i_min());
  }
  std::size_t n_xi_, n_tau_;
  double d_xi_, d_tau_;
  std::vector<double> values_;
};

struct TrilinearParams {
  double k = 0.0;
  double l = 0.0;
  double a = 0.4;
  double a1 = 0.4;
  double a2 = 0.55;

  /// Exponents k = l = 0, a = 1/4 + 3 eps, a1 = 1/2 - 2 eps, a2 = 1/2 + eps.
  static TrilinearParams admissible_defaults(double eps = 0.05);

  /// l >= -1/2, k >= 0, k - l <= 1, a, a1, a2 > 1/4, a + a1 > 3/4,
  /// a + a2 > 3/4, k - l <= 2 a1.
  bool admissible() const;
};

/// Weight of one term of a constrained sum, given
/// (xi, tau) = (xi1 - xi2, tau1 - tau2) and both endpoints.
using TrilinearWeight = std::function<double(double xi, double tau, double xi1,
                                             double tau1, double xi2,
                                             double tau2)>;

/// sum over lattice pairs (1, 2) with (1) - (2) on the lattice of
/// v(xi,tau) v1(xi1,tau1) v2(xi2,tau2) w (d_xi d_tau)^2.
double constrained_lattice_sum(const ModeLattice& v, const ModeLattice& v1,
                               const ModeLattice& v2,
                               const TrilinearWeight& weight);

/// The trilinear form with weight
///   <xi1>^k / (<sigma>^a <sigma1>^a1 <sigma2>^a2 <xi2>^k <xi>^l),
/// sigma = tau, sigma1 = tau1 + xi1^2, sigma2 = tau2 + xi2^2.
/// Throws std::invalid_argument on lattice mismatch.
double trilinear_S(const ModeLattice& v, const ModeLattice& v1,
                   const ModeLattice& v2, const TrilinearParams& p);

struct TrilinearScanRow {
  std::size_t size;
  std::uint64_t seed;
  double ratio;  // max over samples of S / (|v| |v1| |v2|)
  bool admissible;
};

/// Seeded ensemble maxima on size x size lattices with unit spacing and
/// uniform [0, 1) data.
std::vector<TrilinearScanRow> trilinear_ratio_scan(
    const TrilinearParams& p, const std::vector<std::size_t>& sizes,
    std::size_t samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bracket integral and discrete convolution.

/// J(s) = int_R <y - s>^{-2 a_plus} <y + s>^{-2 a_minus} dy by adaptive
/// quadrature (absolute tolerance 1e-10). Requires 0 <= a_minus <= a_plus and
/// a_plus + a_minus > 1/2.
double bracket_integral_J(double s, double a_plus, double a_minus);

/// Decay exponent 2 a_minus - [1 - 2 a_plus]_+ of J.
double bracket_decay_exponent(double a_plus, double a_minus);

/// Full discrete convolution of two profiles sampled on [-m, m] (length
/// 2m + 1, centre at index m). Result has length 4m + 1, centre at 2m.
std::vector<double> centered_convolution(const std::vector<double>& f,
                                         const std::vector<double>& g);

}  // namespace plsim
