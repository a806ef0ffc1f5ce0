#include "plsim/bound_checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plsim {

namespace {

constexpr double kInequalitySlack = 1e-8;
constexpr double kPositivitySlack = 1e-12;

double uniform_spacing(const std::vector<double>& times) {
  const double h = times[1] - times[0];
  for (std::size_t i = 2; i < times.size(); ++i) {
    if (std::abs((times[i] - times[i - 1]) - h) > 1e-9 * std::abs(h))
      throw std::invalid_argument("f1_residual: sampling must be uniform");
  }
  return h;
}

// Centered second-order derivative inside. The one-sided end stencils are
// third order, so their error stays below the Richardson estimate built
// from the second-order interior behaviour.
std::vector<double> derivative(const std::vector<double>& y, double h) {
  const std::size_t n = y.size();
  std::vector<double> d(n);
  d[0] = (-11.0 * y[0] + 18.0 * y[1] - 9.0 * y[2] + 2.0 * y[3]) / (6.0 * h);
  d[n - 1] = (11.0 * y[n - 1] - 18.0 * y[n - 2] + 9.0 * y[n - 3] - 2.0 * y[n - 4]) /
             (6.0 * h);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i - 1]) / (2.0 * h);
  return d;
}

std::vector<double> residual(const std::vector<double>& times,
                             const std::vector<double>& mass,
                             const std::vector<double>& l4,
                             const CgpeParams& p) {
  const double h = uniform_spacing(times);
  std::vector<double> r = derivative(mass, h);
  for (std::size_t i = 0; i < r.size(); ++i)
    r[i] += -2.0 * p.xi * mass[i] + 2.0 * p.sigma * l4[i];
  return r;
}

template <class T>
std::vector<T> every_second(const std::vector<T>& v) {
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); i += 2) out.push_back(v[i]);
  return out;
}

// Builds a report from per-sample slack and tolerance.
CheckReport inequality_report(std::string name, const std::vector<double>& times,
                              const std::vector<double>& margin,
                              const std::vector<double>& tol) {
  CheckReport r;
  r.name = std::move(name);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < margin.size(); ++i) {
    if (margin[i] + tol[i] < worst) {
      worst = margin[i] + tol[i];
      r.worst_margin = margin[i];
      r.tolerance = tol[i];
      r.location = times[i];
    }
  }
  r.passed = r.worst_margin >= -r.tolerance;
  return r;
}

void require_samples(const DiagnosticsSeries& d, std::size_t minimum) {
  d.validate();
  if (d.size() < minimum)
    throw std::invalid_argument("check needs at least " +
                                std::to_string(minimum) + " samples");
}

}  // namespace

std::vector<double> f1_residual_series(const DiagnosticsSeries& d,
                                       const CgpeParams& p) {
  require_samples(d, 4);
  return residual(d.times, d.mass, d.l4_fourth, p);
}

CheckReport f1_residual(const DiagnosticsSeries& d, const CgpeParams& p,
                        double slack_scale) {
  const std::vector<double> fine = f1_residual_series(d, p);
  const std::size_t n = fine.size();

  double scale = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i)
    scale = std::max({scale, 2.0 * p.xi * d.mass[i],
                      2.0 * p.sigma * d.l4_fourth[i]});
  // Round-off floor of the cancellation between the three terms.
  const double floor = 1e-10 * (1.0 + scale);
  std::vector<double> tol(n, floor);

  if (n >= 7) {
    // A consistent series has residual O(h^2), so halving the sample rate
    // quadruples it and (coarse - fine)/3 estimates the fine error. The
    // estimate is taken from the coarse points next to each sample so that
    // a local defect cannot hide behind truncation error elsewhere.
    const auto coarse = residual(every_second(d.times), every_second(d.mass),
                                 every_second(d.l4_fourth), p);
    std::vector<double> spread(coarse.size());
    for (std::size_t c = 0; c < coarse.size(); ++c)
      spread[c] = std::abs(coarse[c] - fine[2 * c]) / 3.0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t lo = i / 2 >= 1 ? i / 2 - 1 : 0;
      const std::size_t hi = std::min(coarse.size() - 1, (i + 1) / 2 + 1);
      double local = 0.0;
      for (std::size_t c = lo; c <= hi; ++c) local = std::max(local, spread[c]);
      tol[i] += 2.0 * local;
    }
  }

  std::vector<double> margin(n);
  for (std::size_t i = 0; i < n; ++i) {
    margin[i] = -std::abs(fine[i]);
    tol[i] *= slack_scale;
  }
  return inequality_report("f1", d.times, margin, tol);
}

double abs_set_envelope_value(double mass0, double t, const CgpeParams& p,
                              double domain_measure) {
  const double decay = std::exp(-2.0 * p.xi * t);
  return mass0 * decay -
         2.0 * p.xi / p.sigma * domain_measure * std::expm1(-2.0 * p.xi * t);
}

CheckReport abs_set_envelope(const DiagnosticsSeries& d, const CgpeParams& p,
                             double domain_measure, double slack_scale) {
  require_samples(d, 1);
  std::vector<double> margin(d.size()), tol(d.size());
  const double t0 = d.times.front();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double env =
        abs_set_envelope_value(d.mass.front(), d.times[i] - t0, p, domain_measure);
    margin[i] = env - d.mass[i];
    tol[i] = slack_scale * kInequalitySlack * (1.0 + env);
  }
  return inequality_report("abs_set", d.times, margin, tol);
}

double lyapunov_rate(const EpParams& p) { return std::min(2.0 * p.alpha, p.beta); }

double lyapunov_envelope_value(double l0, double t, double pump_integral,
                               double gamma) {
  const double asymptote = pump_integral / gamma;
  return std::exp(-gamma * t) * (l0 - asymptote) + asymptote;
}

CheckReport ep_lyapunov(const DiagnosticsSeries& d, const EpParams& p,
                        double slack_scale) {
  require_samples(d, 1);
  if (!d.has_reservoir())
    throw std::invalid_argument("ep_lyapunov: reservoir diagnostics missing");
  if (d.n_min.front() < 0.0)
    throw std::domain_error("ep_lyapunov: initial reservoir must be nonnegative");
  const double gamma = lyapunov_rate(p);
  const double pump_integral = p.pump.integral();
  const double l0 = 0.5 * d.mass.front() + d.n_integral.front();
  const double t0 = d.times.front();
  std::vector<double> margin(d.size()), tol(d.size(), slack_scale * kInequalitySlack);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double l = 0.5 * d.mass[i] + d.n_integral[i];
    margin[i] =
        lyapunov_envelope_value(l0, d.times[i] - t0, pump_integral, gamma) - l;
  }
  return inequality_report("lyapunov", d.times, margin, tol);
}

double reservoir_second_moment_envelope(double n_sq0, double t,
                                        double pump_sq_integral, double beta) {
  return std::exp(-beta * t) * n_sq0 -
         std::expm1(-beta * t) * pump_sq_integral / (beta * beta);
}

CheckReport reservoir_bounds(const DiagnosticsSeries& d, const EpParams& p,
                             double slack_scale) {
  require_samples(d, 1);
  if (!d.has_reservoir())
    throw std::invalid_argument("reservoir_bounds: reservoir diagnostics missing");
  const std::size_t n = d.size();

  std::vector<double> tol_pos(n, slack_scale * kPositivitySlack);
  CheckReport positivity =
      inequality_report("reservoir_positivity", d.times, d.n_min, tol_pos);

  const double pump_sq = p.pump.integral_of_square();
  const double t0 = d.times.front();
  std::vector<double> margin(n), tol(n, slack_scale * kInequalitySlack);
  for (std::size_t i = 0; i < n; ++i) {
    margin[i] = reservoir_second_moment_envelope(d.n_sq_integral.front(),
                                                 d.times[i] - t0, pump_sq,
                                                 p.beta) -
                d.n_sq_integral[i];
  }
  CheckReport moment =
      inequality_report("reservoir_second_moment", d.times, margin, tol);

  const CheckReport& head =
      positivity.worst_margin + positivity.tolerance <
              moment.worst_margin + moment.tolerance
          ? positivity
          : moment;
  CheckReport r;
  r.name = "reservoir";
  r.worst_margin = head.worst_margin;
  r.tolerance = head.tolerance;
  r.location = head.location;
  r.passed = positivity.passed && moment.passed;
  r.parts = {positivity, moment};
  return r;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{"f1", "abs_set", "lyapunov",
                                              "reservoir"};
  return names;
}

bool is_cgpe_check(const std::string& name) {
  return name == "f1" || name == "abs_set";
}

}  // namespace plsim
