#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <numbers>

#include "plsim/bourgain_norms.hpp"
#include "test_support.hpp"

using namespace plsim;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

double bra(double x) { return std::sqrt(1.0 + x * x); }

// Quadruple loop over every (xi1, tau1, xi2, tau2) pair with the difference
// checked against the lattice; weights evaluated directly from the formula.
double brute_force_S(const ModeLattice& v, const ModeLattice& v1,
                     const ModeLattice& v2, const TrilinearParams& p) {
  const long i0 = v.i_min(), j0 = v.j_min();
  const long ni = static_cast<long>(v.n_xi()), nj = static_cast<long>(v.n_tau());
  long double sum = 0.0L;
  for (long i1 = i0; i1 < i0 + ni; ++i1)
    for (long j1 = j0; j1 < j0 + nj; ++j1)
      for (long i2 = i0; i2 < i0 + ni; ++i2)
        for (long j2 = j0; j2 < j0 + nj; ++j2) {
          const long i = i1 - i2, j = j1 - j2;
          if (i < i0 || i >= i0 + ni || j < j0 || j >= j0 + nj) continue;
          const double xi1 = v.xi(i1), xi2 = v.xi(i2), xi = v.xi(i);
          const double tau1 = v.tau(j1), tau2 = v.tau(j2), tau = v.tau(j);
          const double w = std::pow(bra(xi1), p.k) /
                           (std::pow(bra(tau), p.a) *
                            std::pow(bra(tau1 + xi1 * xi1), p.a1) *
                            std::pow(bra(tau2 + xi2 * xi2), p.a2) *
                            std::pow(bra(xi2), p.k) * std::pow(bra(xi), p.l));
          sum += static_cast<long double>(v.at(i, j) * v1.at(i1, j1) *
                                          v2.at(i2, j2) * w);
        }
  const double cell = v.d_xi() * v.d_tau();
  return static_cast<double>(sum) * cell * cell;
}

void fill_random(ModeLattice& lat, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (double& x : lat.values()) x = unif(rng);
}

SpaceTimeField random_spacetime(const Grid1D& g, std::size_t n_time,
                                std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<cplx> v(g.size() * n_time);
  for (auto& z : v) z = {normal(rng), normal(rng)};
  return SpaceTimeField(g, n_time, 3.0, std::move(v));
}

// Windowed free Schroedinger evolution of band-limited data.
SpaceTimeField free_wave(const Grid1D& g, std::size_t n_time, double t_span,
                         const std::vector<cplx>& coeffs, long band) {
  return SpaceTimeField::from_function(g, n_time, t_span, [&](double x, double t) {
    cplx sum{};
    for (long k = -band; k <= band; ++k)
      sum += coeffs[static_cast<std::size_t>(k + band)] *
             std::polar(1.0, k * x - static_cast<double>(k * k) * t);
    return sum;
  });
}

}  // namespace

TEST(Window, ProfileValues) {
  EXPECT_EQ(bump_window(0.5), 1.0);
  EXPECT_EQ(bump_window(0.25), 1.0);
  EXPECT_EQ(bump_window(0.75), 1.0);
  EXPECT_EQ(bump_window(0.0), 0.0);
  EXPECT_NEAR(bump_window(0.125), std::exp(1.0 - 1.0 / 0.75), 1e-15);
  EXPECT_NEAR(bump_window(0.2), bump_window(0.8), 1e-15);
}

TEST(SpaceTimeField, ConstructorValidation) {
  const Grid1D g = make_grid(8, kTwoPi);
  EXPECT_THROW(SpaceTimeField(g, 6, 1.0, std::vector<cplx>(48)), std::invalid_argument);
  EXPECT_THROW(SpaceTimeField(g, 9, 1.0, std::vector<cplx>(72)), std::invalid_argument);
  EXPECT_THROW(SpaceTimeField(g, 8, 0.0, std::vector<cplx>(64)), std::invalid_argument);
  EXPECT_THROW(SpaceTimeField(g, 8, 1.0, std::vector<cplx>(63)), std::invalid_argument);
}

TEST(SpaceTimeTransform, SingleModeConcentrates) {
  const Grid1D g = make_grid(16, kTwoPi);
  const std::size_t n_time = 64;
  const double t_span = kTwoPi;  // dtau = 1
  const double tau0 = 5.0;
  const auto f = SpaceTimeField::from_function(g, n_time, t_span, [&](double x, double t) {
    return std::polar(1.0, x - tau0 * t);
  });
  const auto spec = spacetime_transform(f);
  std::size_t peak_j = 0;
  double peak = 0.0;
  for (std::size_t j = 0; j < n_time; ++j) {
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.mode_index(i) != 1) {
        EXPECT_LE(std::abs(spec.at(j, i)), 1e-13);
        continue;
      }
      if (std::abs(spec.at(j, i)) > peak) {
        peak = std::abs(spec.at(j, i));
        peak_j = j;
      }
    }
  }
  EXPECT_DOUBLE_EQ(spec.tau(peak_j), -tau0);
  // The bump's main lobe spans five lattice steps on either side.
  const std::size_t i1 = 1;
  for (std::size_t j = 0; j < n_time; ++j) {
    if (std::abs(spec.tau(j) + tau0) >= 6.0 * spec.dtau())
      EXPECT_LE(std::abs(spec.at(j, i1)), 0.01 * peak) << "tau=" << spec.tau(j);
  }
}

TEST(SpaceTimeTransform, Parseval) {
  std::mt19937_64 rng(11);
  const Grid1D g = make_grid(16, 5.0);
  for (int trial = 0; trial < 5; ++trial) {
    const auto f = random_spacetime(g, 32, rng).windowed();
    const auto spec = spacetime_transform(f);
    double lhs = 0.0, rhs = 0.0;
    for (const auto& z : f.values()) lhs += std::norm(z);
    lhs *= g.dx() * f.dt();
    for (const auto& z : spec.coeffs) rhs += std::norm(z);
    rhs *= spec.dk() * spec.dtau();
    EXPECT_NEAR(lhs, rhs, 1e-12 * lhs);
  }
}

TEST(XsbNorm, SingleLatticeMode) {
  const Grid1D g = make_grid(16, kTwoPi);
  auto spec = SpaceTimeSpectrum::zeros(g, 32, 4.0);
  const std::size_t ik = 3, jt = 30;  // k = 3, tau = -2 dtau
  const double A = 0.7;
  spec.at(jt, ik) = A;
  const double k = spec.k(ik), tau = spec.tau(jt);
  const double scale = std::sqrt(spec.dk() * spec.dtau());
  const double s = 0.8, b = 0.35;
  EXPECT_NEAR(xsb_norm(spec, s, b, Dispersion::schroedinger),
              A * std::pow(bra(k), s) * std::pow(bra(tau + k * k), b) * scale, 1e-14);
  EXPECT_NEAR(ys_norm(spec, s, Dispersion::schroedinger),
              A * std::pow(bra(k), s) / bra(tau + k * k) * spec.dtau() * std::sqrt(spec.dk()),
              1e-14);
  EXPECT_EQ(ys_norm(SpaceTimeSpectrum::zeros(g, 32, 4.0), s, Dispersion::none), 0.0);
}

TEST(XsbNorm, PlainL2AndMonotoneInB) {
  std::mt19937_64 rng(12);
  const Grid1D g = make_grid(16, kTwoPi);
  for (int trial = 0; trial < 10; ++trial) {
    const auto f = random_spacetime(g, 32, rng);
    const double l2 = spacetime_lp_norm(f, 2.0);
    const double x_s = xsb_norm(f, 0.0, 0.0, Dispersion::schroedinger);
    const double x_n = xsb_norm(f, 0.0, 0.0, Dispersion::none);
    EXPECT_NEAR(x_s, l2, 1e-12 * l2);
    EXPECT_NEAR(x_s, x_n, 1e-13 * l2);
    double prev = 0.0;
    for (double b : {0.0, 0.1, 0.375, 0.5, 1.0}) {
      const double x = xsb_norm(f, 0.5, b, Dispersion::schroedinger);
      EXPECT_GE(x, prev);
      prev = x;
    }
  }
  EXPECT_THROW(spacetime_lp_norm(random_spacetime(g, 8, rng), 3.0), std::invalid_argument);
}

TEST(XsbNorm, FreeEvolutionProportionalToData) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> normal;
  const Grid1D g = make_grid(32, kTwoPi);
  const long band = 4;
  std::vector<double> ratios;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> c(2 * band + 1);
    for (auto& z : c) z = {normal(rng), normal(rng)};
    double l2 = 0.0;
    for (const auto& z : c) l2 += std::norm(z);
    l2 = std::sqrt(l2 * kTwoPi);
    const auto f = free_wave(g, 128, kTwoPi, c, band);
    ratios.push_back(xsb_norm(f, 0.0, 0.45, Dispersion::schroedinger) / l2);
  }
  const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
  EXPECT_LE(*hi / *lo, 1.05);
}

TEST(YsNorm, CauchySchwarzConstantHolds) {
  std::mt19937_64 rng(14);
  const Grid1D g = make_grid(16, kTwoPi);
  const double eps = 0.1, s = 0.5;
  for (int trial = 0; trial < 100; ++trial) {
    const auto spec = spacetime_transform(random_spacetime(g, 32, rng));
    const double c = ys_xsb_constant(spec, eps, Dispersion::schroedinger);
    const double ys = ys_norm(spec, s, Dispersion::schroedinger);
    const double xs = xsb_norm(spec, s, -0.5 + eps, Dispersion::schroedinger);
    EXPECT_LE(ys, c * xs * (1.0 + 1e-12));
  }
}

TEST(L4Ratio, InvariancesAndErrors) {
  std::mt19937_64 rng(15);
  const Grid1D g = make_grid(32, kTwoPi);
  const auto f = random_spacetime(g, 64, rng);
  const double r = l4_strichartz_ratio(f);
  EXPECT_GT(r, 0.0);
  for (long shift : {1L, 7L, -3L})
    EXPECT_NEAR(l4_strichartz_ratio(f.shifted_in_space(shift)), r, 1e-12 * r);
  SpaceTimeField doubled = f;
  for (auto& z : doubled.values()) z *= 2.0;
  EXPECT_NEAR(l4_strichartz_ratio(doubled), r, 1e-13 * r);
  EXPECT_NEAR(l4_strichartz_ratio(f.windowed()), r, 1e-13 * r);
  const SpaceTimeField zero(g, 64, 1.0, std::vector<cplx>(g.size() * 64));
  EXPECT_THROW(l4_strichartz_ratio(zero), std::domain_error);
}

TEST(L4Ratio, FreeWaveIsFinite) {
  const Grid1D g = make_grid(32, kTwoPi);
  const auto f = SpaceTimeField::from_function(g, 64, 1.0, [](double x, double t) {
    return std::polar(1.0, x - t);
  });
  const double r = l4_strichartz_ratio(f);
  EXPECT_TRUE(std::isfinite(r));
  EXPECT_GT(r, 0.0);
}

TEST(Trilinear, DeltaMassExample) {
  ModeLattice v(4, 4), v1(4, 4), v2(4, 4);
  v2.at(0, 0) = 1.0;
  v1.at(1, 0) = 1.0;
  v.at(1, 0) = 1.0;
  const TrilinearParams p{0.0, 0.0, 0.5, 0.5, 0.5};
  EXPECT_NEAR(trilinear_S(v, v1, v2, p), std::pow(std::sqrt(2.0), -0.5), 1e-15);
  ModeLattice zero(4, 4);
  EXPECT_EQ(trilinear_S(zero, v1, v2, p), 0.0);
  EXPECT_EQ(trilinear_S(v, zero, v2, p), 0.0);
  EXPECT_EQ(trilinear_S(v, v1, zero, p), 0.0);
}

TEST(Trilinear, MatchesBruteForceOnAllSmallLattices) {
  std::mt19937_64 rng(16);
  const std::vector<TrilinearParams> params{
      TrilinearParams::admissible_defaults(0.05),
      {0.7, 0.2, 0.3, 0.45, 0.6},
      {2.0, 0.0, 0.5, 0.5, 0.5}};
  for (std::size_t nx = 2; nx <= 8; nx += 2)
    for (std::size_t nt = 2; nt <= 8; nt += 2)
      for (double dx : {1.0, 0.5}) {
        ModeLattice v(nx, nt, dx, 1.0), v1(nx, nt, dx, 1.0), v2(nx, nt, dx, 1.0);
        fill_random(v, rng);
        fill_random(v1, rng);
        fill_random(v2, rng);
        for (const auto& p : params) {
          const double fast = trilinear_S(v, v1, v2, p);
          const double slow = brute_force_S(v, v1, v2, p);
          EXPECT_NEAR(fast, slow, 1e-12 * std::max(1.0, slow)) << nx << "x" << nt;
        }
      }
}

TEST(Trilinear, GenericSumWithFormulaWeightAgrees) {
  std::mt19937_64 rng(17);
  ModeLattice v(8, 6), v1(8, 6), v2(8, 6);
  fill_random(v, rng);
  fill_random(v1, rng);
  fill_random(v2, rng);
  const TrilinearParams p = TrilinearParams::admissible_defaults(0.05);
  const TrilinearWeight w = [&](double xi, double tau, double xi1, double tau1,
                                double xi2, double tau2) {
    return std::pow(bra(xi1), p.k) /
           (std::pow(bra(tau), p.a) * std::pow(bra(tau1 + xi1 * xi1), p.a1) *
            std::pow(bra(tau2 + xi2 * xi2), p.a2) * std::pow(bra(xi2), p.k) *
            std::pow(bra(xi), p.l));
  };
  const double s = trilinear_S(v, v1, v2, p);
  EXPECT_NEAR(constrained_lattice_sum(v, v1, v2, w), s, 1e-12 * s);
}

TEST(Trilinear, MismatchAndDeterminism) {
  ModeLattice a(4, 4), b(4, 6);
  EXPECT_THROW(trilinear_S(a, a, b, TrilinearParams{}), std::invalid_argument);
  EXPECT_THROW(ModeLattice(3, 4), std::invalid_argument);

  const auto p = TrilinearParams::admissible_defaults(0.05);
  EXPECT_TRUE(p.admissible());
  EXPECT_FALSE((TrilinearParams{2.0, 0.0, 0.4, 0.4, 0.55}.admissible()));
  const auto r1 = trilinear_ratio_scan(p, {4, 8}, 3, 99);
  const auto r2 = trilinear_ratio_scan(p, {4, 8}, 3, 99);
  ASSERT_EQ(r1.size(), 2u);
  for (std::size_t i = 0; i < r1.size(); ++i) {
    EXPECT_EQ(r1[i].ratio, r2[i].ratio);
    EXPECT_GT(r1[i].ratio, 0.0);
    EXPECT_TRUE(r1[i].admissible);
  }
  EXPECT_THROW(trilinear_ratio_scan(p, {2}, 1, 1), std::invalid_argument);
  EXPECT_THROW(trilinear_ratio_scan(p, {4}, 0, 1), std::invalid_argument);
}

TEST(BracketIntegral, ClosedForms) {
  EXPECT_NEAR(bracket_integral_J(0.0, 0.5, 0.5), kPi, 1e-10);
  for (double c : {0.75, 1.0, 1.6, 3.0}) {
    const double exact = std::sqrt(kPi) * boost::math::tgamma(c - 0.5) / boost::math::tgamma(c);
    EXPECT_NEAR(bracket_integral_J(0.0, c / 2.0, c / 2.0), exact, 1e-10);
  }
  for (double s : {0.3, 1.0, 2.5, 10.0})
    EXPECT_NEAR(bracket_integral_J(s, 1.0, 1.0), kPi / (2.0 * (1.0 + s * s)), 1e-10);
}

TEST(BracketIntegral, SymmetryAndDecay) {
  for (double s : {0.5, 3.0, 12.0})
    EXPECT_NEAR(bracket_integral_J(s, 0.6, 0.3), bracket_integral_J(-s, 0.6, 0.3), 1e-12);
  const double alpha = bracket_decay_exponent(0.5, 0.4);
  EXPECT_NEAR(alpha, 0.8, 1e-15);
  std::vector<double> scaled;
  for (double s : {1.0, 2.0, 4.0, 8.0, 16.0})
    scaled.push_back(bracket_integral_J(s, 0.5, 0.4) * std::pow(bra(s), alpha));
  const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
  EXPECT_LE(*hi / *lo, 3.0);
}

TEST(BracketIntegral, RejectsDivergentParameters) {
  EXPECT_THROW(bracket_integral_J(1.0, 0.25, 0.25), std::invalid_argument);
  EXPECT_THROW(bracket_integral_J(1.0, 0.3, 0.5), std::invalid_argument);
  EXPECT_THROW(bracket_integral_J(1.0, 0.8, -0.1), std::invalid_argument);
}

TEST(Convolution, EvenDecreasingProfilesPeakAtCentre) {
  std::mt19937_64 rng(18);
  std::uniform_int_distribution<int> step(0, 5), half_width(1, 12);
  for (int trial = 0; trial < 50; ++trial) {
    const int m = half_width(rng);
    auto profile = [&] {
      std::vector<double> f(2 * m + 1);
      double value = 40.0 + step(rng);
      for (int d = 0; d <= m; ++d) {
        f[m + d] = f[m - d] = value;
        value = std::max(0.0, value - step(rng));
      }
      return f;
    };
    const auto f = profile(), h = profile();
    const auto c = centered_convolution(f, h);
    ASSERT_EQ(c.size(), static_cast<std::size_t>(4 * m + 1));
    const double centre = c[2 * m];
    for (std::size_t i = 0; i < c.size(); ++i) {
      EXPECT_LE(c[i], centre);
      EXPECT_EQ(c[i], c[c.size() - 1 - i]);
    }
  }
  EXPECT_THROW(centered_convolution({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
}
