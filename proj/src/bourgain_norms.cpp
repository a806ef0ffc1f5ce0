#include "plsim/bourgain_norms.hpp"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <thread>

namespace plsim {

double bump_window(double unit_time) {
  const double d = 2.0 * std::abs(unit_time - 0.5);
  if (d <= 0.5) return 1.0;
  const double r = 2.0 * d - 1.0;
  if (r >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - r * r));
}

SpaceTimeField::SpaceTimeField(Grid1D grid, std::size_t n_time, double t_span,
                               std::vector<cplx> values, TimeWindow window)
    : grid_(std::move(grid)),
      n_time_(n_time),
      t_span_(t_span),
      values_(std::move(values)),
      window_(window) {
  if (n_time_ < 8 || n_time_ % 2 != 0)
    throw std::invalid_argument("space-time field: n_time must be even, >= 8");
  if (!(t_span_ > 0.0))
    throw std::invalid_argument("space-time field: t_span must be positive");
  if (values_.size() != n_time_ * grid_.size())
    throw std::invalid_argument("space-time field: value count mismatch");
}

SpaceTimeField SpaceTimeField::from_snapshots(
    const std::vector<Field>& snapshots, double spacing) {
  if (snapshots.empty())
    throw std::invalid_argument("space-time field: no snapshots");
  const Grid1D& grid = snapshots.front().grid();
  std::vector<cplx> v;
  v.reserve(snapshots.size() * grid.size());
  for (const Field& f : snapshots) {
    if (!(f.grid() == grid))
      throw std::invalid_argument("space-time field: snapshot grid mismatch");
    const Field phys = to_physical(f);
    v.insert(v.end(), phys.values().begin(), phys.values().end());
  }
  return SpaceTimeField(grid, snapshots.size(),
                        spacing * static_cast<double>(snapshots.size()),
                        std::move(v));
}

SpaceTimeField SpaceTimeField::windowed() const {
  if (window_ == TimeWindow::smooth_bump) return *this;
  SpaceTimeField out = *this;
  for (std::size_t j = 0; j < n_time_; ++j) {
    const double w =
        bump_window(static_cast<double>(j) / static_cast<double>(n_time_));
    for (std::size_t l = 0; l < grid_.size(); ++l) out.at(j, l) *= w;
  }
  out.window_ = TimeWindow::smooth_bump;
  return out;
}

SpaceTimeField SpaceTimeField::shifted_in_space(long shift) const {
  SpaceTimeField out = *this;
  const auto n = static_cast<long>(grid_.size());
  for (std::size_t j = 0; j < n_time_; ++j) {
    for (long l = 0; l < n; ++l) {
      const long src = ((l - shift) % n + n) % n;
      out.at(j, static_cast<std::size_t>(l)) =
          at(j, static_cast<std::size_t>(src));
    }
  }
  return out;
}

double SpaceTimeSpectrum::dk() const {
  return 2.0 * std::numbers::pi / grid.length();
}

double SpaceTimeSpectrum::dtau() const {
  return 2.0 * std::numbers::pi / t_span;
}

double SpaceTimeSpectrum::tau(std::size_t j) const {
  const auto m = static_cast<long>(n_time);
  const auto idx = static_cast<long>(j);
  return dtau() * static_cast<double>(idx < m / 2 ? idx : idx - m);
}

SpaceTimeSpectrum SpaceTimeSpectrum::zeros(const Grid1D& grid,
                                           std::size_t n_time, double t_span) {
  return {grid, n_time, t_span, std::vector<cplx>(grid.size() * n_time)};
}

SpaceTimeSpectrum spacetime_transform(const SpaceTimeField& f) {
  const SpaceTimeField w = f.windowed();
  SpaceTimeSpectrum spec{w.grid(), w.n_time(), w.t_span(),
                         {w.values().begin(), w.values().end()}};
  fft::dft_2d(spec.coeffs, w.n_time(), w.n_points(), -1);
  const double scale = w.grid().dx() * w.dt() / (2.0 * std::numbers::pi);
  for (auto& c : spec.coeffs) c *= scale;
  return spec;
}

double dispersion_symbol(Dispersion d, double k) {
  return d == Dispersion::schroedinger ? k * k : 0.0;
}

double xsb_norm(const SpaceTimeSpectrum& spec, double s, double b,
                Dispersion d) {
  double sum = 0.0;
  for (std::size_t j = 0; j < spec.n_time; ++j) {
    for (std::size_t i = 0; i < spec.grid.size(); ++i) {
      const double k = spec.k(i);
      const double mod = spec.tau(j) + dispersion_symbol(d, k);
      const double w =
          std::pow(1.0 + k * k, s) * std::pow(1.0 + mod * mod, b);
      sum += w * std::norm(spec.at(j, i));
    }
  }
  return std::sqrt(sum * spec.dk() * spec.dtau());
}

double xsb_norm(const SpaceTimeField& f, double s, double b, Dispersion d) {
  return xsb_norm(spacetime_transform(f), s, b, d);
}

double ys_norm(const SpaceTimeSpectrum& spec, double s, Dispersion d) {
  double outer = 0.0;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    const double k = spec.k(i);
    double inner = 0.0;
    for (std::size_t j = 0; j < spec.n_time; ++j) {
      const double mod = spec.tau(j) + dispersion_symbol(d, k);
      inner += std::abs(spec.at(j, i)) / bracket(mod);
    }
    inner *= spec.dtau();
    outer += std::pow(1.0 + k * k, s) * inner * inner;
  }
  return std::sqrt(outer * spec.dk());
}

double ys_norm(const SpaceTimeField& f, double s, Dispersion d) {
  return ys_norm(spacetime_transform(f), s, d);
}

double ys_xsb_constant(const SpaceTimeSpectrum& spec, double eps,
                       Dispersion d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < spec.grid.size(); ++i) {
    double sum = 0.0;
    for (std::size_t j = 0; j < spec.n_time; ++j) {
      const double mod = spec.tau(j) + dispersion_symbol(d, spec.k(i));
      sum += std::pow(1.0 + mod * mod, -0.5 - eps);
    }
    worst = std::max(worst, sum * spec.dtau());
  }
  return std::sqrt(worst);
}

double spacetime_lp_norm(const SpaceTimeField& f, double p) {
  const SpaceTimeField w = f.windowed();
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& z : w.values()) sum += std::norm(z);
    return std::sqrt(sum * w.grid().dx() * w.dt());
  }
  if (p == 4.0) {
    for (const auto& z : w.values()) sum += std::norm(z) * std::norm(z);
    return std::pow(sum * w.grid().dx() * w.dt(), 0.25);
  }
  throw std::invalid_argument("spacetime_lp_norm: only p = 2 and p = 4");
}

double l4_strichartz_ratio(const SpaceTimeField& f) {
  const SpaceTimeField w = f.windowed();
  const double denom = xsb_norm(w, 0.0, 3.0 / 8.0, Dispersion::schroedinger);
  if (!(denom > 0.0))
    throw std::domain_error("l4_strichartz_ratio: zero X^{0,3/8} norm");
  return spacetime_lp_norm(w, 4.0) / denom;
}

L4EnsembleRow l4_ratio_ensemble(std::size_t n_points, std::size_t n_time,
                                std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("l4 ensemble: samples must be >= 1");
  const Grid1D grid = make_grid(n_points, 2.0 * std::numbers::pi);
  const long band = static_cast<long>(n_points / 4);
  const double t_span = 1.0;
  const double dt = t_span / static_cast<double>(n_time);

  // Mode-by-time phase table exp(-i k^2 t_j), shared by all samples.
  std::vector<cplx> phase(n_time * grid.size());
  for (std::size_t j = 0; j < n_time; ++j)
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double k = grid.wavenumber(i);
      phase[j * grid.size() + i] = std::polar(1.0, -k * k * dt * static_cast<double>(j));
    }

  double best = 0.0;
  for (std::size_t sample = 0; sample < samples; ++sample) {
    std::seed_seq sseq{static_cast<std::uint32_t>(seed),
                       static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(n_points),
                       static_cast<std::uint32_t>(sample)};
    std::mt19937_64 rng(sseq);
    std::normal_distribution<double> normal;
    std::vector<cplx> coeffs(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (std::labs(grid.mode_index(i)) <= band) {
        const double re = normal(rng);
        const double im = normal(rng);
        coeffs[i] = {re, im};
      }
    }
    std::vector<cplx> values(n_time * grid.size());
    for (std::size_t j = 0; j < n_time; ++j) {
      std::span<cplx> row(values.data() + j * grid.size(), grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i)
        row[i] = coeffs[i] * phase[j * grid.size() + i];
      fft::dft_1d(row, +1);
    }
    const SpaceTimeField f(grid, n_time, t_span, std::move(values));
    best = std::max(best, l4_strichartz_ratio(f));
  }
  return {n_points, n_time, samples, seed, best};
}

// ---------------------------------------------------------------------------

ModeLattice::ModeLattice(std::size_t n_xi, std::size_t n_tau, double d_xi,
                         double d_tau)
    : n_xi_(n_xi),
      n_tau_(n_tau),
      d_xi_(d_xi),
      d_tau_(d_tau),
      values_(n_xi * n_tau, 0.0) {
  if (n_xi == 0 || n_tau == 0 || n_xi % 2 != 0 || n_tau % 2 != 0)
    throw std::invalid_argument("mode lattice: sizes must be even, positive");
  if (!(d_xi > 0.0) || !(d_tau > 0.0))
    throw std::invalid_argument("mode lattice: spacings must be positive");
}

double ModeLattice::l2_norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum * d_xi_ * d_tau_);
}

TrilinearParams TrilinearParams::admissible_defaults(double eps) {
  return {0.0, 0.0, 0.25 + 3.0 * eps, 0.5 - 2.0 * eps, 0.5 + eps};
}

bool TrilinearParams::admissible() const {
  return l >= -0.5 && k >= 0.0 && k - l <= 1.0 && a > 0.25 && a1 > 0.25 &&
         a2 > 0.25 && a + a1 > 0.75 && a + a2 > 0.75 && k - l <= 2.0 * a1;
}

namespace {

void check_lattices(const ModeLattice& v, const ModeLattice& v1,
                    const ModeLattice& v2) {
  if (!v.same_lattice(v1) || !v.same_lattice(v2))
    throw std::invalid_argument("trilinear sum: lattice mismatch");
}

// Calls body(outer_index) for outer_index in [0, count) across threads and
// stores results in place; the caller reduces them in index order.
template <class Body>
std::vector<double> parallel_partials(std::size_t count, Body body) {
  std::vector<double> partial(count, 0.0);
  const std::size_t workers = std::clamp<std::size_t>(
      std::thread::hardware_concurrency(), 1, std::max<std::size_t>(count / 64, 1));
  if (workers <= 1) {
    for (std::size_t o = 0; o < count; ++o) partial[o] = body(o);
    return partial;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t o = w; o < count; o += workers) partial[o] = body(o);
    });
  }
  pool.clear();
  return partial;
}

double ordered_sum(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s;
}

}  // namespace

double constrained_lattice_sum(const ModeLattice& v, const ModeLattice& v1,
                               const ModeLattice& v2,
                               const TrilinearWeight& weight) {
  check_lattices(v, v1, v2);
  const long ni = static_cast<long>(v.n_xi());
  const long nj = static_cast<long>(v.n_tau());
  const std::size_t outer = v.n_xi() * v.n_tau();
  auto partial = parallel_partials(outer, [&](std::size_t o) {
    const long i1 = v.i_min() + static_cast<long>(o) % ni;
    const long j1 = v.j_min() + static_cast<long>(o) / ni;
    const double a1 = v1.at(i1, j1);
    if (a1 == 0.0) return 0.0;
    double acc = 0.0;
    for (long j2 = v.j_min(); j2 < v.j_min() + nj; ++j2) {
      for (long i2 = v.i_min(); i2 < v.i_min() + ni; ++i2) {
        if (!v.contains(i1 - i2, j1 - j2)) continue;
        const double b = v.at(i1 - i2, j1 - j2) * v2.at(i2, j2);
        if (b == 0.0) continue;
        acc += b * weight(v.xi(i1 - i2), v.tau(j1 - j2), v.xi(i1), v.tau(j1),
                          v.xi(i2), v.tau(j2));
      }
    }
    return a1 * acc;
  });
  const double cell = v.d_xi() * v.d_tau();
  return ordered_sum(partial) * cell * cell;
}

double trilinear_S(const ModeLattice& v, const ModeLattice& v1,
                   const ModeLattice& v2, const TrilinearParams& p) {
  check_lattices(v, v1, v2);
  const long ni = static_cast<long>(v.n_xi());
  const long nj = static_cast<long>(v.n_tau());

  // The weight factorizes over the three lattice points, so fold each
  // factor into its own array once.
  ModeLattice w1 = v1, w2 = v2, w = v;
  for (long j = v.j_min(); j < v.j_min() + nj; ++j) {
    for (long i = v.i_min(); i < v.i_min() + ni; ++i) {
      const double xi = v.xi(i);
      const double tau = v.tau(j);
      const double modulation = tau + xi * xi;
      w1.at(i, j) *= std::pow(bracket(xi), p.k) * std::pow(bracket(modulation), -p.a1);
      w2.at(i, j) *= std::pow(bracket(xi), -p.k) * std::pow(bracket(modulation), -p.a2);
      w.at(i, j) *= std::pow(bracket(xi), -p.l) * std::pow(bracket(tau), -p.a);
    }
  }

  const std::size_t outer = v.n_xi() * v.n_tau();
  auto partial = parallel_partials(outer, [&](std::size_t o) {
    const long i1 = v.i_min() + static_cast<long>(o) % ni;
    const long j1 = v.j_min() + static_cast<long>(o) / ni;
    const double a1 = w1.at(i1, j1);
    if (a1 == 0.0) return 0.0;
    // Range of (i2, j2) keeping (i1 - i2, j1 - j2) on the lattice.
    const long i_lo = std::max(v.i_min(), i1 - (v.i_min() + ni - 1));
    const long i_hi = std::min(v.i_min() + ni - 1, i1 - v.i_min());
    const long j_lo = std::max(v.j_min(), j1 - (v.j_min() + nj - 1));
    const long j_hi = std::min(v.j_min() + nj - 1, j1 - v.j_min());
    double acc = 0.0;
    for (long j2 = j_lo; j2 <= j_hi; ++j2)
      for (long i2 = i_lo; i2 <= i_hi; ++i2)
        acc += w2.at(i2, j2) * w.at(i1 - i2, j1 - j2);
    return a1 * acc;
  });
  const double cell = v.d_xi() * v.d_tau();
  return ordered_sum(partial) * cell * cell;
}

std::vector<TrilinearScanRow> trilinear_ratio_scan(
    const TrilinearParams& p, const std::vector<std::size_t>& sizes,
    std::size_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("scan: samples must be >= 1");
  std::vector<TrilinearScanRow> rows;
  for (std::size_t n : sizes) {
    if (n < 4) throw std::invalid_argument("scan: sizes must be >= 4");
    double best = 0.0;
    for (std::size_t sample = 0; sample < samples; ++sample) {
      std::seed_seq sseq{static_cast<std::uint32_t>(seed),
                         static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(n),
                         static_cast<std::uint32_t>(sample)};
      std::mt19937_64 rng(sseq);
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      ModeLattice v(n, n), v1(n, n), v2(n, n);
      for (auto* lat : {&v, &v1, &v2})
        for (double& x : lat->values()) x = unif(rng);
      const double denom = v.l2_norm() * v1.l2_norm() * v2.l2_norm();
      if (denom == 0.0) continue;
      best = std::max(best, trilinear_S(v, v1, v2, p) / denom);
    }
    rows.push_back({n, seed, best, p.admissible()});
  }
  return rows;
}

// ---------------------------------------------------------------------------

double bracket_decay_exponent(double a_plus, double a_minus) {
  return 2.0 * a_minus - std::max(0.0, 1.0 - 2.0 * a_plus);
}

double bracket_integral_J(double s, double a_plus, double a_minus) {
  if (!(a_minus >= 0.0) || !(a_plus >= a_minus))
    throw std::invalid_argument("bracket integral: need 0 <= a_minus <= a_plus");
  if (!(a_plus + a_minus > 0.5))
    throw std::invalid_argument(
        "bracket integral: diverges unless a_plus + a_minus > 1/2");
  using namespace boost::math::quadrature;
  // J(-s) = J(s) under y -> -y.
  s = std::abs(s);
  auto integrand = [=](double y) {
    return std::pow(1.0 + (y - s) * (y - s), -a_plus) *
           std::pow(1.0 + (y + s) * (y + s), -a_minus);
  };
  // Both peaks lie inside the middle interval; the tails are monotone.
  const double edge = s + 1.0;
  const double middle =
      gauss_kronrod<double, 61>::integrate(integrand, -edge, edge, 30, 1e-15);
  exp_sinh<double> tail;
  const double inf = std::numeric_limits<double>::infinity();
  const double right =
      tail.integrate([&](double t) { return integrand(edge + t); }, 0.0, inf, 1e-14);
  const double left =
      tail.integrate([&](double t) { return integrand(-edge - t); }, 0.0, inf, 1e-14);
  return middle + right + left;
}

std::vector<double> centered_convolution(const std::vector<double>& f,
                                         const std::vector<double>& g) {
  if (f.size() != g.size() || f.size() % 2 == 0)
    throw std::invalid_argument("convolution: profiles must share odd length");
  std::vector<double> out(f.size() + g.size() - 1, 0.0);
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = 0; b < g.size(); ++b) out[a + b] += f[a] * g[b];
  return out;
}

}  // namespace plsim
