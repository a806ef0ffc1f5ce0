#include <gtest/gtest.h>

#include <boost/numeric/odeint.hpp>
#include <numbers>

#include "plsim/model_dynamics.hpp"
#include "test_support.hpp"

using namespace plsim;
using plsim::testing::max_abs_diff;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

EpParams ep_params(const Grid1D& g, double pump) {
  return EpParams{1.0, 1.0, 1.0, 0.5, 1.0, RealField::constant(g, pump)};
}

// Second-order finite-difference Laplacian, independent of the FFT path.
Field fd_laplacian(const Field& u) {
  const std::size_t n = u.size();
  const double h2 = u.grid().dx() * u.grid().dx();
  Field out = Field::zeros(u.grid());
  for (std::size_t j = 0; j < n; ++j)
    out[j] = (u[(j + 1) % n] - 2.0 * u[j] + u[(j + n - 1) % n]) / h2;
  return out;
}

}  // namespace

TEST(Params, Validation) {
  EXPECT_NO_THROW((CgpeParams{1.0, 2.0}.validate()));
  EXPECT_THROW((CgpeParams{0.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((CgpeParams{1.0, -1.0}.validate()), std::invalid_argument);
  const Grid1D g = make_grid(8, 1.0);
  EpParams p = ep_params(g, 1.0);
  EXPECT_NO_THROW(p.validate());
  p.pump[3] = -0.1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = ep_params(g, 1.0);
  p.beta = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(CgpeRhs, Examples) {
  const Grid1D g = make_grid(64, kTwoPi);
  const CgpeParams unit{1.0, 1.0};
  const Field zero = Field::zeros(g);
  EXPECT_EQ(plsim::testing::max_abs(cgpe_rhs(zero, unit)), 0.0);

  const Field one = Field::from_function(g, [](double) { return cplx{1.0}; });
  const Field r1 = cgpe_rhs(one, unit);
  for (std::size_t j = 0; j < g.size(); ++j)
    EXPECT_LE(std::abs(r1[j] - cplx{0.0, -1.0}), 1e-14);

  EXPECT_THROW(cgpe_rhs(to_spectral(one), unit), std::invalid_argument);
}

TEST(CgpeRhs, PlaneWaveAgainstFiniteDifferences) {
  const Grid1D g = make_grid(256, kTwoPi);
  const CgpeParams p{1.0, 2.0};
  const Field u = Field::from_function(g, [](double x) { return std::polar(1.0, x); });
  const Field r = cgpe_rhs(u, p);

  const Field lap = fd_laplacian(u);
  const cplx i{0.0, 1.0};
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double rho2 = std::norm(u[j]);
    const cplx fd = i * lap[j] - i * rho2 * u[j] + (p.xi - p.sigma * rho2) * u[j];
    EXPECT_LE(std::abs(r[j] - fd), 1e-4);  // O(dx^2) consistency error
    // Transform round-off is amplified by k_max^2 ~ 1.6e4 at N = 256.
    EXPECT_LE(std::abs(r[j] - cplx{-1.0, -2.0} * u[j]), 1e-11);
  }
}

TEST(CgpeRhs, DispersionIsMinusKSquaredModewise) {
  std::mt19937_64 rng(3);
  const Grid1D g = make_grid(64, kTwoPi);
  const CgpeParams p{0.7, 1.3};
  const Field u = plsim::testing::random_band_limited(g, 6, rng);
  const Field rhs_hat = to_spectral(cgpe_rhs(u, p));

  Field nl = u;
  for (std::size_t j = 0; j < u.size(); ++j)
    nl[j] = -cplx{p.sigma, 1.0} * std::norm(u[j]) * u[j];
  const Field nl_hat = dealias(to_spectral(nl));
  const Field u_hat = to_spectral(u);
  for (std::size_t m = 0; m < g.size(); ++m) {
    const cplx dispersion = rhs_hat[m] - nl_hat[m] - p.xi * u_hat[m];
    const double k = g.wavenumber(m);
    EXPECT_LE(std::abs(dispersion - cplx{0.0, -k * k} * u_hat[m]),
              1e-12 * (1.0 + std::abs(u_hat[m]) * k * k));
  }
}

TEST(CgpeRhs, GaugeCovariance) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> phase(0.0, kTwoPi);
  const Grid1D g = make_grid(64, kTwoPi);
  const CgpeParams p{1.0, 1.0};
  const Field u = plsim::testing::random_band_limited(g, 8, rng);
  const Field base = cgpe_rhs(u, p);
  for (int trial = 0; trial < 20; ++trial) {
    const cplx rot = std::polar(1.0, phase(rng));
    Field v = u;
    for (auto& z : v.values()) z *= rot;
    const Field r = cgpe_rhs(v, p);
    for (std::size_t j = 0; j < g.size(); ++j)
      EXPECT_LE(std::abs(r[j] - rot * base[j]), 1e-13 * (1.0 + std::abs(base[j])));
  }
}

TEST(EpRhs, Examples) {
  const Grid1D g = make_grid(32, 10.0);
  EpParams p = ep_params(g, 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) p.pump[j] = 0.1 * static_cast<double>(j % 5);
  const auto [du, dn] = ep_rhs(Field::zeros(g), RealField::zeros(g), p);
  EXPECT_EQ(plsim::testing::max_abs(du), 0.0);
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_EQ(dn[j], p.pump[j]);

  const EpParams q = ep_params(g, 2.0);
  const Field one = Field::from_function(g, [](double) { return cplx{1.0}; });
  const auto [du1, dn1] = ep_rhs(one, RealField::constant(g, 0.3), q);
  for (std::size_t j = 0; j < g.size(); ++j)
    EXPECT_NEAR(dn1[j], 2.0 - (q.R + q.beta) * 0.3, 1e-15);

  const Grid1D other = make_grid(16, 10.0);
  EXPECT_THROW(ep_rhs(one, RealField::zeros(other), q), std::invalid_argument);
}

TEST(EpRhs, AffineInReservoir) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> unif(0.0, 2.0);
  const Grid1D g = make_grid(64, 20.0);
  EpParams p = ep_params(g, 1.5);
  const Field u = plsim::testing::random_band_limited(g, 5, rng);
  auto random_n = [&] {
    return RealField::from_function(g, [&](double) { return unif(rng); });
  };
  for (int trial = 0; trial < 10; ++trial) {
    const RealField n1 = random_n(), n2 = random_n();
    RealField sum = n1;
    for (std::size_t j = 0; j < g.size(); ++j) sum[j] += n2[j];
    const auto a = ep_rhs(u, sum, p).second;
    const auto b = ep_rhs(u, n1, p).second;
    const auto c = ep_rhs(u, n2, p).second;
    const auto d = ep_rhs(u, RealField::zeros(g), p).second;
    for (std::size_t j = 0; j < g.size(); ++j)
      EXPECT_NEAR(a[j] - b[j] - c[j] + d[j], 0.0, 1e-13);
  }
}

TEST(FlatClosedForm, StationaryAndZero) {
  const CgpeParams p{1.3, 0.6};
  const double rho_star = std::sqrt(p.xi / p.sigma);
  for (double t : {0.0, 0.5, 3.0, 40.0}) {
    const cplx z = cgpe_flat_closed_form(rho_star, 0.2, t, p);
    EXPECT_NEAR(std::abs(z), rho_star, 1e-13);
    // Phase advances at the rate -rho*^2 = -xi/sigma.
    EXPECT_NEAR(std::remainder(std::arg(z) - (0.2 - p.xi / p.sigma * t), kTwoPi),
                0.0, 1e-11);
    EXPECT_EQ(cgpe_flat_closed_form(0.0, 0.3, t, p), cplx{});
  }
}

TEST(FlatClosedForm, MatchesAdaptiveOdeIntegration) {
  namespace odeint = boost::numeric::odeint;
  const CgpeParams p{1.0, 1.0};
  const double rho0 = 0.1, t_end = 5.0;
  // State (rho^2, theta).
  using State = std::array<double, 2>;
  State y{rho0 * rho0, 0.0};
  auto system = [&](const State& s, State& dsdt, double) {
    dsdt[0] = 2.0 * (p.xi - p.sigma * s[0]) * s[0];
    dsdt[1] = -s[0];
  };
  odeint::integrate_adaptive(
      odeint::make_controlled<odeint::runge_kutta_dopri5<State>>(1e-14, 1e-14),
      system, y, 0.0, t_end, 1e-3);

  const double e10 = std::exp(10.0);
  const double formula = e10 * 0.01 / (1.0 + 0.01 * (e10 - 1.0));
  const cplx z = cgpe_flat_closed_form(rho0, 0.0, t_end, p);
  EXPECT_NEAR(std::norm(z), formula, 1e-13 * formula);
  EXPECT_NEAR(std::norm(z), y[0], 1e-8 * y[0]);
  EXPECT_NEAR(std::remainder(std::arg(z) - y[1], kTwoPi), 0.0, 1e-8 * std::abs(y[1]));
}

TEST(FixedPoint, ExampleAndResidual) {
  const Grid1D g = make_grid(32, 10.0);
  const EpParams p = ep_params(g, 1.0);
  const auto fp = ep_homogeneous_fixed_point(p);
  ASSERT_TRUE(fp.has_value());
  EXPECT_NEAR(fp->n_star, 0.5, 1e-15);
  EXPECT_NEAR(fp->amplitude_sq, 1.0, 1e-15);
  EXPECT_NEAR(fp->omega, 1.5, 1e-15);

  const Field u = Field::from_function(g, [&](double) {
    return cplx{std::sqrt(fp->amplitude_sq), 0.0};
  });
  const auto [du, dn] = ep_rhs(u, RealField::constant(g, fp->n_star), p);
  for (std::size_t j = 0; j < g.size(); ++j) {
    EXPECT_LE(std::abs(du[j] - cplx{0.0, -fp->omega} * u[j]), 1e-14);
    EXPECT_LE(std::abs(dn[j]), 1e-14);
  }
}

TEST(FixedPoint, ThresholdAndErrors) {
  const Grid1D g = make_grid(16, 10.0);
  EXPECT_FALSE(ep_homogeneous_fixed_point(ep_params(g, 0.5)).has_value());
  EXPECT_FALSE(ep_homogeneous_fixed_point(ep_params(g, 0.0)).has_value());
  EpParams p = ep_params(g, 1.0);
  p.pump[0] = 2.0;
  EXPECT_THROW(ep_homogeneous_fixed_point(p), std::invalid_argument);
}

TEST(FixedPoint, CgpeFlatStateHasZeroResidual) {
  const Grid1D g = make_grid(32, kTwoPi);
  const CgpeParams p{1.5, 0.5};
  const double rho = std::sqrt(p.xi / p.sigma);
  const Field u = Field::from_function(g, [&](double) { return cplx{rho, 0.0}; });
  const Field r = cgpe_rhs(u, p);
  for (std::size_t j = 0; j < g.size(); ++j)
    EXPECT_LE(std::abs(r[j] - cplx{0.0, -rho * rho} * u[j]), 1e-12);
}
