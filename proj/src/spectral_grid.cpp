#include "plsim/spectral_grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <tuple>

namespace plsim {

namespace fft {
namespace {

// FFTW planning is not thread safe; execution of an existing plan on new
// arrays is. FFTW_UNALIGNED lets any std::vector buffer be used.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(std::size_t n0, std::size_t n1, int sign) {
    const auto key = std::make_tuple(n0, n1, sign);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(n0 * std::max<std::size_t>(n1, 1));
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan =
        n1 == 0 ? fftw_plan_dft_1d(static_cast<int>(n0), buf, buf, sign, flags)
                : fftw_plan_dft_2d(static_cast<int>(n0), static_cast<int>(n1),
                                   buf, buf, sign, flags);
    if (plan == nullptr) throw std::runtime_error("fftw planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<std::size_t, std::size_t, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

}  // namespace

void dft_1d(std::span<cplx> data, int sign) {
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_cache().get(data.size(), 0, sign), p, p);
}

void dft_2d(std::span<cplx> data, std::size_t n_rows, std::size_t n_cols,
            int sign) {
  if (data.size() != n_rows * n_cols)
    throw std::invalid_argument("dft_2d: buffer size mismatch");
  auto* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan_cache().get(n_rows, n_cols, sign), p, p);
}

}  // namespace fft

Grid1D::Grid1D(std::size_t n_points, double length)
    : n_points_(n_points), length_(length) {
  if (n_points < 4 || n_points % 2 != 0)
    throw std::invalid_argument("grid: n_points must be even and >= 4");
  if (!(length > 0.0) || !std::isfinite(length))
    throw std::invalid_argument("grid: length must be positive");
  auto k = std::make_shared<std::vector<double>>(n_points);
  const double scale = 2.0 * std::numbers::pi / length;
  for (std::size_t i = 0; i < n_points; ++i)
    (*k)[i] = scale * static_cast<double>(mode_index(i));
  wavenumbers_ = std::move(k);
}

long Grid1D::mode_index(std::size_t i) const {
  const auto n = static_cast<long>(n_points_);
  const auto m = static_cast<long>(i);
  return m < n / 2 ? m : m - n;
}

Grid1D make_grid(std::size_t n_points, double length) {
  return Grid1D(n_points, length);
}

Field::Field(Grid1D grid, std::vector<cplx> values, Representation rep)
    : grid_(std::move(grid)), values_(std::move(values)), rep_(rep) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("field: value count does not match grid");
}

Field Field::zeros(const Grid1D& grid, Representation rep) {
  return Field(grid, std::vector<cplx>(grid.size()), rep);
}

bool Field::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

RealField::RealField(Grid1D grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw std::invalid_argument("real field: value count does not match grid");
}

RealField RealField::zeros(const Grid1D& grid) {
  return RealField(grid, std::vector<double>(grid.size(), 0.0));
}

RealField RealField::constant(const Grid1D& grid, double value) {
  return RealField(grid, std::vector<double>(grid.size(), value));
}

double RealField::integral() const {
  double sum = 0.0;
  for (double v : values_) sum += v;
  return sum * grid_.dx();
}

double RealField::integral_of_square() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return sum * grid_.dx();
}

double RealField::min() const {
  return *std::min_element(values_.begin(), values_.end());
}

double RealField::max() const {
  return *std::max_element(values_.begin(), values_.end());
}

bool RealField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

Field transform(const Field& field, Direction direction) {
  const bool forward = direction == Direction::forward;
  if (forward != field.is_physical())
    throw std::invalid_argument(
        "transform: field is already in the requested representation");
  std::vector<cplx> data(field.values().begin(), field.values().end());
  fft::dft_1d(data, forward ? FFTW_FORWARD : FFTW_BACKWARD);
  const double norm = 1.0 / std::sqrt(static_cast<double>(data.size()));
  for (auto& c : data) c *= norm;
  return Field(field.grid(), std::move(data),
               forward ? Representation::spectral : Representation::physical);
}

Field to_physical(const Field& field) {
  return field.is_physical() ? field : transform(field, Direction::inverse);
}

Field to_spectral(const Field& field) {
  return field.is_physical() ? transform(field, Direction::forward) : field;
}

Field dealias(const Field& field) {
  if (field.is_physical())
    throw std::invalid_argument("dealias: field must be spectral");
  Field out = field;
  const long cutoff = static_cast<long>(field.size()) / 3;
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (std::labs(out.grid().mode_index(i)) > cutoff) out[i] = 0.0;
  }
  return out;
}

double hs_norm(const Field& field, double s) {
  const Field spec = to_spectral(field);
  const auto k = spec.grid().wavenumbers();
  double sum = 0.0;
  for (std::size_t i = 0; i < spec.size(); ++i) {
    const double w = s == 0.0 ? 1.0 : std::pow(1.0 + k[i] * k[i], s);
    sum += w * std::norm(spec[i]);
  }
  return std::sqrt(sum * spec.grid().dx());
}

double lp_norm(const Field& field, double p) {
  if (!field.is_physical())
    throw std::invalid_argument("lp_norm: field must be physical");
  double sum = 0.0;
  if (p == 2.0) {
    for (const auto& z : field.values()) sum += std::norm(z);
    return std::sqrt(sum * field.grid().dx());
  }
  if (p == 4.0) {
    for (const auto& z : field.values()) {
      const double a = std::norm(z);
      sum += a * a;
    }
    return std::pow(sum * field.grid().dx(), 0.25);
  }
  throw std::invalid_argument("lp_norm: only p = 2 and p = 4 are supported");
}

}  // namespace plsim
