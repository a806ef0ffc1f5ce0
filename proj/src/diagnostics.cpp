#include "plsim/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace plsim {

namespace {

bool finite_column(const std::vector<double>& v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace

void DiagnosticsSeries::validate() const {
  const std::size_t n = times.size();
  if (mass.size() != n || l4_fourth.size() != n)
    throw std::invalid_argument("diagnostics: ragged columns");
  if (has_reservoir() &&
      (n_integral.size() != n || n_sq_integral.size() != n || n_min.size() != n))
    throw std::invalid_argument("diagnostics: ragged reservoir columns");
  for (const auto* col :
       {&times, &mass, &l4_fourth, &n_integral, &n_sq_integral, &n_min}) {
    if (!finite_column(*col))
      throw std::invalid_argument("diagnostics: non-finite entry");
  }
  for (double m : mass) {
    if (m < 0.0) throw std::invalid_argument("diagnostics: negative mass");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("diagnostics: times must increase");
  }
}

void DiagnosticsSeries::append(double t, const Field& u) {
  times.push_back(t);
  mass.push_back(mass_of(u));
  l4_fourth.push_back(l4_fourth_of(u));
}

void DiagnosticsSeries::append(double t, const Field& u, const RealField& n) {
  append(t, u);
  n_integral.push_back(n.integral());
  n_sq_integral.push_back(n.integral_of_square());
  n_min.push_back(n.min());
}

double mass_of(const Field& u) {
  const Field phys = to_physical(u);
  double sum = 0.0;
  for (const auto& z : phys.values()) sum += std::norm(z);
  return sum * u.grid().dx();
}

double l4_fourth_of(const Field& u) {
  const Field phys = to_physical(u);
  double sum = 0.0;
  for (const auto& z : phys.values()) {
    const double a = std::norm(z);
    sum += a * a;
  }
  return sum * u.grid().dx();
}

}  // namespace plsim
