#include "plsim/duhamel_picard.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace plsim {

TimeMesh make_time_mesh(double delta, std::size_t n_nodes) {
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw std::invalid_argument("time mesh: delta must be positive");
  if (n_nodes < 3) throw std::invalid_argument("time mesh: need >= 3 nodes");
  TimeMesh mesh{delta, std::vector<double>(n_nodes)};
  const double h = delta / static_cast<double>(n_nodes - 1);
  for (std::size_t j = 0; j < n_nodes; ++j)
    mesh.nodes[j] = h * static_cast<double>(j);
  mesh.nodes.back() = delta;
  return mesh;
}

namespace {

// exp(-i k^2 t) applied to spectral data in place.
void propagate(std::span<cplx> spec, std::span<const double> k, double t) {
  for (std::size_t m = 0; m < spec.size(); ++m)
    spec[m] *= std::polar(1.0, -k[m] * k[m] * t);
}

// Duhamel update for the condensate: given the forcing F(t_j) at every node
// (physical), returns S(t_j)[u0_hat + int_0^{t_j} S(-tau) F(tau) dtau].
std::vector<Field> duhamel_condensate(const Field& u0_hat,
                                      const std::vector<Field>& forcing,
                                      const TimeMesh& mesh) {
  const Grid1D& grid = u0_hat.grid();
  const auto k = grid.wavenumbers();
  const double h = mesh.spacing();

  std::vector<Field> out;
  out.reserve(mesh.size());
  std::vector<cplx> acc(grid.size(), cplx{});
  std::vector<cplx> prev;
  for (std::size_t j = 0; j < mesh.size(); ++j) {
    Field w = transform(forcing[j], Direction::forward);
    propagate(w.values(), k, -mesh.nodes[j]);  // S(-t_j) F(t_j)
    if (j > 0) {
      for (std::size_t m = 0; m < acc.size(); ++m)
        acc[m] += 0.5 * h * (prev[m] + w[m]);
    }
    prev.assign(w.values().begin(), w.values().end());

    Field u = u0_hat;
    for (std::size_t m = 0; m < acc.size(); ++m) u[m] += acc[m];
    propagate(u.values(), k, mesh.nodes[j]);
    out.push_back(transform(u, Direction::inverse));
  }
  return out;
}

double field_distance(const Field& a, const Field& b, double s) {
  Field d = a;
  for (std::size_t j = 0; j < d.size(); ++j) d[j] -= b[j];
  return hs_norm(d, s);
}

double reservoir_distance_sq(const RealField& a, const RealField& b) {
  double sum = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    sum += d * d;
  }
  return sum * a.grid().dx();
}

std::vector<Field> free_evolution(const Field& u0_hat, const TimeMesh& mesh) {
  std::vector<Field> out;
  out.reserve(mesh.size());
  for (double t : mesh.nodes) {
    Field u = u0_hat;
    propagate(u.values(), u.grid().wavenumbers(), t);
    out.push_back(transform(u, Direction::inverse));
  }
  return out;
}

bool increasing_run(const std::vector<double>& diffs) {
  const std::size_t n = diffs.size();
  return n >= 4 && diffs[n - 1] > diffs[n - 2] && diffs[n - 2] > diffs[n - 3] &&
         diffs[n - 3] > diffs[n - 4];
}

bool all_finite(const std::vector<Field>& fs) {
  return std::all_of(fs.begin(), fs.end(),
                     [](const Field& f) { return f.all_finite(); });
}

template <class T>
void push_iterate(std::vector<std::vector<T>>& store, std::vector<T> it,
                  bool keep_all) {
  if (!keep_all && store.size() >= 2) store.pop_back();
  store.push_back(std::move(it));
}

}  // namespace

IterateHistory picard_cgpe(const Field& u0, const TimeMesh& mesh,
                           const CgpeParams& p, double s, std::size_t max_iter,
                           const PicardOptions& options) {
  if (max_iter < 2) throw std::invalid_argument("picard: max_iter must be >= 2");
  const Field u0_hat = to_spectral(u0);
  const cplx cubic = -cplx{p.sigma, 1.0};  // -(sigma + i)

  IterateHistory h;
  h.initial_norm = hs_norm(u0_hat, s);
  const double stop = options.stop_tolerance * (1.0 + h.initial_norm);
  std::vector<Field> current = free_evolution(u0_hat, mesh);
  h.iterates.push_back(current);

  for (std::size_t m = 0; m < max_iter; ++m) {
    std::vector<Field> forcing;
    forcing.reserve(mesh.size());
    for (const Field& u : current) {
      Field f = u;
      for (std::size_t j = 0; j < f.size(); ++j)
        f[j] = (p.xi + cubic * std::norm(u[j])) * u[j];
      forcing.push_back(std::move(f));
    }
    std::vector<Field> next = duhamel_condensate(u0_hat, forcing, mesh);

    double diff = 0.0;
    for (std::size_t j = 0; j < mesh.size(); ++j)
      diff = std::max(diff, field_distance(next[j], current[j], s));
    if (!all_finite(next) || !std::isfinite(diff)) {
      h.diffs.push_back(std::numeric_limits<double>::infinity());
      h.diverged = true;
      break;
    }
    h.diffs.push_back(diff);
    current = next;
    push_iterate(h.iterates, std::move(next), options.keep_all_iterates);
    if (increasing_run(h.diffs)) {
      h.diverged = true;
      break;
    }
    if (m >= 1 && diff <= stop) break;
  }
  return h;
}

IterateHistory picard_ep(const Field& u0, const RealField& n0,
                         const TimeMesh& mesh, const EpParams& p,
                         std::size_t max_iter, const PicardOptions& options) {
  if (max_iter < 2) throw std::invalid_argument("picard: max_iter must be >= 2");
  if (!(u0.grid() == n0.grid()) || !(u0.grid() == p.pump.grid()))
    throw std::invalid_argument("picard_ep: grid mismatch");
  const Field u0_hat = to_spectral(u0);
  const double h_t = mesh.spacing();
  const cplx i{0.0, 1.0};

  IterateHistory h;
  h.initial_norm =
      std::sqrt(std::pow(hs_norm(u0_hat, 0.0), 2) + n0.integral_of_square());
  const double stop = options.stop_tolerance * (1.0 + h.initial_norm);
  std::vector<Field> u_cur = free_evolution(u0_hat, mesh);
  std::vector<RealField> n_cur(mesh.size(), n0);
  h.iterates.push_back(u_cur);
  h.reservoir_iterates.push_back(n_cur);

  for (std::size_t m = 0; m < max_iter; ++m) {
    std::vector<Field> forcing;
    forcing.reserve(mesh.size());
    std::vector<RealField> n_rate;
    n_rate.reserve(mesh.size());
    for (std::size_t j = 0; j < mesh.size(); ++j) {
      const Field& u = u_cur[j];
      const RealField& n = n_cur[j];
      Field f = u;
      RealField r = n;
      for (std::size_t x = 0; x < f.size(); ++x) {
        const double rho2 = std::norm(u[x]);
        f[x] = (-i * p.g * rho2 + cplx{p.R, -p.lambda} * n[x] - p.alpha) * u[x];
        r[x] = p.pump[x] - p.R * rho2 * n[x] - p.beta * n[x];
      }
      forcing.push_back(std::move(f));
      n_rate.push_back(std::move(r));
    }
    std::vector<Field> u_next = duhamel_condensate(u0_hat, forcing, mesh);
    std::vector<RealField> n_next;
    n_next.reserve(mesh.size());
    n_next.push_back(n0);
    for (std::size_t j = 1; j < mesh.size(); ++j) {
      RealField n = n_next.back();
      for (std::size_t x = 0; x < n.size(); ++x)
        n[x] += 0.5 * h_t * (n_rate[j - 1][x] + n_rate[j][x]);
      n_next.push_back(std::move(n));
    }

    double diff = 0.0;
    bool finite = all_finite(u_next);
    for (std::size_t j = 0; j < mesh.size(); ++j) {
      finite = finite && n_next[j].all_finite();
      const double du = field_distance(u_next[j], u_cur[j], 0.0);
      diff = std::max(
          diff, std::sqrt(du * du + reservoir_distance_sq(n_next[j], n_cur[j])));
    }
    if (!finite || !std::isfinite(diff)) {
      h.diffs.push_back(std::numeric_limits<double>::infinity());
      h.diverged = true;
      break;
    }
    h.diffs.push_back(diff);
    u_cur = u_next;
    n_cur = n_next;
    push_iterate(h.iterates, std::move(u_next), options.keep_all_iterates);
    push_iterate(h.reservoir_iterates, std::move(n_next),
                 options.keep_all_iterates);
    if (increasing_run(h.diffs)) {
      h.diverged = true;
      break;
    }
    if (m >= 1 && diff <= stop) break;
  }
  return h;
}

ContractionReport contraction_report(const std::vector<double>& diffs,
                                     double initial_norm, bool diverged) {
  if (diffs.size() < 2)
    throw std::invalid_argument("contraction_report: need at least 3 iterates");
  ContractionReport r;
  r.diverged = diverged;
  // Ratios whose numerator sits at round-off level carry no information.
  const double floor = 1e-12 * (1.0 + initial_norm);
  for (std::size_t m = 0; m + 1 < diffs.size(); ++m) {
    const double ratio = diffs[m] > 0.0 ? diffs[m + 1] / diffs[m] : 0.0;
    r.ratios.push_back(ratio);
    if (diffs[m + 1] > floor || !std::isfinite(ratio))
      r.max_ratio = std::max(r.max_ratio, ratio);
  }
  r.final_residual = diffs.back();
  r.converged = !diverged && r.final_residual <= 1e-10 * (1.0 + initial_norm);
  return r;
}

ContractionReport contraction_report(const IterateHistory& h) {
  return contraction_report(h.diffs, h.initial_norm, h.diverged);
}

ExistenceBracket bracket_existence_time(const Field& u0, const CgpeParams& p,
                                        double s, std::size_t n_nodes,
                                        std::size_t max_iter,
                                        double delta_start, double target_ratio,
                                        double delta_max) {
  if (!(target_ratio > 1.0))
    throw std::invalid_argument("bracket: target_ratio must exceed 1");
  ExistenceBracket b{0.0, 0.0, 0};
  const PicardOptions opts{.keep_all_iterates = false};
  auto converges = [&](double delta) {
    ++b.runs;
    const auto h = picard_cgpe(u0, make_time_mesh(delta, n_nodes), p, s,
                               max_iter, opts);
    return contraction_report(h).converged;
  };

  double delta = delta_start;
  if (converges(delta)) {
    b.delta_ok = delta;
    while (true) {
      delta *= 2.0;
      if (delta > delta_max) {
        b.delta_fail = std::numeric_limits<double>::infinity();
        return b;
      }
      if (!converges(delta)) break;
      b.delta_ok = delta;
    }
    b.delta_fail = delta;
  } else {
    b.delta_fail = delta;
    for (int halvings = 0;; ++halvings) {
      delta *= 0.5;
      if (halvings > 40) {
        b.delta_ok = 0.0;
        return b;
      }
      if (converges(delta)) break;
      b.delta_fail = delta;
    }
    b.delta_ok = delta;
  }
  while (b.delta_fail / b.delta_ok > target_ratio) {
    const double mid = std::sqrt(b.delta_ok * b.delta_fail);
    if (converges(mid)) {
      b.delta_ok = mid;
    } else {
      b.delta_fail = mid;
    }
  }
  return b;
}

}  // namespace plsim
