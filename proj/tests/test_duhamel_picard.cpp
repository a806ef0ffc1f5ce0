#include <gtest/gtest.h>

#include <numbers>

#include "plsim/duhamel_picard.hpp"
#include "plsim/time_integrators.hpp"
#include "test_support.hpp"

using namespace plsim;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double relative_l2(const Field& a, const Field& b) {
  Field d = a;
  for (std::size_t j = 0; j < d.size(); ++j) d[j] -= b[j];
  return lp_norm(d, 2.0) / lp_norm(b, 2.0);
}

Field strang_reference(const Field& u0, double t, const CgpeParams& p,
                       std::size_t steps) {
  CgpeState s{u0, 0.0};
  for (std::size_t i = 0; i < steps; ++i)
    s = strang_step_cgpe(s, t / static_cast<double>(steps), p);
  return s.u;
}

}  // namespace

TEST(TimeMesh, NodesAndErrors) {
  const TimeMesh m = make_time_mesh(0.5, 11);
  EXPECT_EQ(m.size(), 11u);
  EXPECT_DOUBLE_EQ(m.spacing(), 0.05);
  EXPECT_EQ(m.nodes.front(), 0.0);
  EXPECT_EQ(m.nodes.back(), 0.5);
  EXPECT_THROW(make_time_mesh(0.0, 11), std::invalid_argument);
  EXPECT_THROW(make_time_mesh(0.1, 2), std::invalid_argument);
}

TEST(ContractionReport, SyntheticSequences) {
  const auto geometric = contraction_report({1.0, 0.5, 0.25, 0.125, 1e-15}, 1.0);
  EXPECT_DOUBLE_EQ(geometric.max_ratio, 0.5);
  EXPECT_TRUE(geometric.converged);
  ASSERT_EQ(geometric.ratios.size(), 4u);

  const auto stalled = contraction_report({1.0, 0.5, 0.4}, 1.0);
  EXPECT_FALSE(stalled.converged);
  EXPECT_DOUBLE_EQ(stalled.max_ratio, 0.8);

  const auto diverged = contraction_report({1.0, 2.0, 4.0, 8.0}, 1.0, true);
  EXPECT_FALSE(diverged.converged);
  EXPECT_TRUE(diverged.diverged);
  EXPECT_DOUBLE_EQ(diverged.max_ratio, 2.0);

  EXPECT_THROW(contraction_report({1.0}, 1.0), std::invalid_argument);
}

TEST(PicardCgpe, ZeroDataIsFixed) {
  const Grid1D g = make_grid(16, kTwoPi);
  const auto h = picard_cgpe(Field::zeros(g), make_time_mesh(0.1, 9),
                             CgpeParams{}, 1.0, 10);
  ASSERT_GE(h.diffs.size(), 2u);
  EXPECT_EQ(h.diffs[0], 0.0);
  const auto r = contraction_report(h);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.max_ratio, 0.0);
}

TEST(PicardCgpe, FlatDataConvergesToClosedFormAtSecondOrder) {
  const Grid1D g = make_grid(8, kTwoPi);
  const CgpeParams p{1.0, 1.0};
  const double rho0 = 0.8, delta = 0.2;
  const Field u0 = Field::from_function(g, [&](double) { return cplx{rho0, 0.0}; });
  auto error = [&](std::size_t nodes) {
    const auto h = picard_cgpe(u0, make_time_mesh(delta, nodes), p, 0.0, 60);
    EXPECT_TRUE(contraction_report(h).converged);
    const cplx exact = cgpe_flat_closed_form(rho0, 0.0, delta, p);
    return std::abs(h.last().back()[0] - exact) / std::abs(exact);
  };
  const double e1 = error(11), e2 = error(21);
  EXPECT_LE(e2, 1e-4);
  EXPECT_NEAR(e1 / e2, 4.0, 0.4);
}

TEST(PicardCgpe, ContractsOnNormalizedDataAndMatchesStrang) {
  std::mt19937_64 rng(2024);
  const Grid1D g = make_grid(64, kTwoPi);
  const CgpeParams p{1.0, 1.0};
  for (int trial = 0; trial < 3; ++trial) {
    const Field u0 = plsim::testing::random_normalized(g, 8, 1.0, rng);
    const auto h = picard_cgpe(u0, make_time_mesh(0.05, 65), p, 1.0, 40);
    const auto r = contraction_report(h);
    EXPECT_TRUE(r.converged);
    EXPECT_LT(r.max_ratio, 0.9);

    const auto half = contraction_report(
        picard_cgpe(u0, make_time_mesh(0.025, 65), p, 1.0, 40));
    EXPECT_LE(half.max_ratio, r.max_ratio * (1.0 + 1e-9));

    const Field ref = strang_reference(u0, 0.05, p, 400);
    EXPECT_LE(relative_l2(h.last().back(), ref), 1e-4);
  }
}

TEST(PicardCgpe, LargeDataOnLongIntervalFails) {
  const Grid1D g = make_grid(32, kTwoPi);
  const Field u0 = Field::from_function(g, [](double x) {
    return cplx{4.0 + std::cos(x), 0.0};
  });
  const auto h = picard_cgpe(u0, make_time_mesh(2.0, 17), CgpeParams{}, 1.0, 30);
  const auto r = contraction_report(h);
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.max_ratio, 1.0);
}

TEST(PicardCgpe, KeepsOnlyEndpointsWhenAsked) {
  const Grid1D g = make_grid(16, kTwoPi);
  const Field u0 = Field::from_function(g, [](double x) { return cplx{0.3 * std::cos(x), 0.0}; });
  const auto h = picard_cgpe(u0, make_time_mesh(0.05, 9), CgpeParams{}, 1.0, 30,
                             {.keep_all_iterates = false});
  EXPECT_EQ(h.iterates.size(), 2u);
  EXPECT_GT(h.diffs.size(), 2u);
  EXPECT_THROW(picard_cgpe(u0, make_time_mesh(0.05, 9), CgpeParams{}, 1.0, 1),
               std::invalid_argument);
}

TEST(PicardEp, ConvergesToStrangTrajectory) {
  const Grid1D g = make_grid(32, kTwoPi);
  const EpParams p{1.0, 0.5, 1.2, 0.5, 2.0, RealField::from_function(g, [](double x) {
                     return 1.0 + 0.5 * std::cos(x);
                   })};
  const Field u0 = Field::from_function(g, [](double x) {
    return cplx{0.5 + 0.2 * std::cos(x), 0.1 * std::sin(x)};
  });
  const RealField n0 = RealField::from_function(g, [](double x) { return 0.4 + 0.1 * std::sin(x); });
  const double delta = 0.1;
  const auto h = picard_ep(u0, n0, make_time_mesh(delta, 65), p, 40);
  const auto r = contraction_report(h);
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.max_ratio, 0.9);
  ASSERT_EQ(h.reservoir_iterates.size(), h.iterates.size());

  EpState s{u0, n0, 0.0};
  for (int i = 0; i < 400; ++i) s = strang_step_ep(s, delta / 400.0, p);
  EXPECT_LE(relative_l2(h.last().back(), s.u), 1e-4);
  const RealField& n_end = h.reservoir_iterates.back().back();
  for (std::size_t j = 0; j < g.size(); ++j) EXPECT_NEAR(n_end[j], s.n[j], 1e-4);
}

TEST(PicardEp, GridMismatchThrows) {
  const Grid1D g = make_grid(16, kTwoPi), other = make_grid(8, kTwoPi);
  const EpParams p{1.0, 1.0, 1.0, 0.5, 1.0, RealField::constant(g, 1.0)};
  EXPECT_THROW(picard_ep(Field::zeros(g), RealField::zeros(other),
                         make_time_mesh(0.1, 5), p, 5),
               std::invalid_argument);
}

TEST(ExistenceBracket, BracketsTheTransition) {
  const Grid1D g = make_grid(32, kTwoPi);
  const CgpeParams p{1.0, 1.0};
  auto data = [&](double amp) {
    return Field::from_function(g, [&](double x) { return cplx{amp * (1.0 + 0.5 * std::cos(x)), 0.0}; });
  };
  const auto small = bracket_existence_time(data(1.0), p, 1.0, 17, 40);
  const auto large = bracket_existence_time(data(3.0), p, 1.0, 17, 40);
  for (const auto& b : {small, large}) {
    EXPECT_GT(b.delta_ok, 0.0);
    EXPECT_GT(b.delta_fail, b.delta_ok);
    EXPECT_LE(b.delta_fail / b.delta_ok, 1.25 + 1e-12);
  }
  EXPECT_LT(large.delta_ok, small.delta_ok);
  EXPECT_THROW(bracket_existence_time(data(1.0), p, 1.0, 17, 40, 0.05, 1.0),
               std::invalid_argument);
}
