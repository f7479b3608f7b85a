#include "kgl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "kgl/errors.hpp"

namespace kgl {

NonPositiveMetric::NonPositiveMetric(std::size_t point, double min_eigenvalue)
    : Error([&] {
        std::ostringstream os;
        os << "metric not positive definite at point " << point
           << " (smallest eigenvalue " << min_eigenvalue << ")";
        return os.str();
      }()),
      point_(point),
      min_eigenvalue_(min_eigenvalue) {}

NotConverged::NotConverged(const std::string& what, int iterations, double residual)
    : Error([&] {
        std::ostringstream os;
        os << what << ": not converged after " << iterations
           << " iterations (residual " << residual << ")";
        return os.str();
      }()),
      iterations_(iterations),
      residual_(residual) {}

GridSpec::GridSpec(int n, int m) : n_(n), m_(m) {
  if (n != 1 && n != 2) throw ConfigInvalid("grid: complex dimension must be 1 or 2");
  if (m < 8 || (m & (m - 1)) != 0)
    throw ConfigInvalid("grid: points per axis must be a power of two >= 8");
  size_ = 1;
  for (int a = 0; a < 2 * n; ++a) size_ *= static_cast<std::size_t>(m);
  std::size_t s = 1;
  for (int a = 2 * n - 1; a >= 0; --a) {
    strides_[a] = s;
    s *= static_cast<std::size_t>(m);
  }
  cell_volume_ = std::pow(h(), 2 * n);
}

std::size_t GridSpec::shift(std::size_t index, int axis, int delta) const noexcept {
  const int c = coord(index, axis);
  int c2 = (c + delta) % m_;
  if (c2 < 0) c2 += m_;
  return index + (static_cast<std::ptrdiff_t>(c2) - c) * static_cast<std::ptrdiff_t>(strides_[axis]);
}

std::size_t GridSpec::index(std::span<const int> coords) const {
  if (static_cast<int>(coords.size()) != axes())
    throw Error("grid: coordinate count does not match axis count");
  std::size_t idx = 0;
  for (int a = 0; a < axes(); ++a) {
    int c = coords[a] % m_;
    if (c < 0) c += m_;
    idx += static_cast<std::size_t>(c) * strides_[a];
  }
  return idx;
}

Hermitian Hermitian::identity(int n) { return scalar(n, 1.0); }

Hermitian Hermitian::scalar(int n, double value) {
  return make(n, value, n == 2 ? value : 0.0);
}

Hermitian Hermitian::make(int n, double d0, double d1, Complex off) {
  Hermitian g(n);
  g.d_[0] = d0;
  if (n == 2) {
    g.d_[1] = d1;
    g.off_ = off;
  }
  return g;
}

Complex Hermitian::operator()(int i, int j) const noexcept {
  if (i == j) return d_[i];
  return i < j ? off_ : std::conj(off_);
}

double Hermitian::trace() const noexcept { return n_ == 1 ? d_[0] : d_[0] + d_[1]; }

double Hermitian::det() const noexcept {
  return n_ == 1 ? d_[0] : d_[0] * d_[1] - std::norm(off_);
}

double Hermitian::min_eigenvalue() const noexcept {
  if (n_ == 1) return d_[0];
  const double mean = 0.5 * (d_[0] + d_[1]);
  const double half = 0.5 * (d_[0] - d_[1]);
  return mean - std::sqrt(half * half + std::norm(off_));
}

double Hermitian::max_eigenvalue() const noexcept {
  if (n_ == 1) return d_[0];
  const double mean = 0.5 * (d_[0] + d_[1]);
  const double half = 0.5 * (d_[0] - d_[1]);
  return mean + std::sqrt(half * half + std::norm(off_));
}

Hermitian Hermitian::inverse() const {
  const double d = det();
  if (n_ == 1) return make(1, 1.0 / d);
  return make(2, d_[1] / d, d_[0] / d, -off_ / d);
}

double Hermitian::trace_against(const Hermitian& o) const {
  if (n_ == 1) return o.d_[0] / d_[0];
  const double num = d_[1] * o.d_[0] + d_[0] * o.d_[1] -
                     2.0 * (off_ * std::conj(o.off_)).real();
  return num / det();
}

Hermitian Hermitian::operator+(const Hermitian& o) const noexcept {
  Hermitian r(n_);
  r.d_ = {d_[0] + o.d_[0], d_[1] + o.d_[1]};
  r.off_ = off_ + o.off_;
  return r;
}

Hermitian Hermitian::operator-(const Hermitian& o) const noexcept {
  Hermitian r(n_);
  r.d_ = {d_[0] - o.d_[0], d_[1] - o.d_[1]};
  r.off_ = off_ - o.off_;
  return r;
}

Hermitian Hermitian::operator*(double s) const noexcept {
  Hermitian r(n_);
  r.d_ = {d_[0] * s, d_[1] * s};
  r.off_ = off_ * s;
  return r;
}

double volume_factor(int n) noexcept { return n == 1 ? 2.0 : 8.0; }

double volume_density(const Hermitian& g) noexcept { return volume_factor(g.n()) * g.det(); }

ScalarField::ScalarField(const GridSpec& grid, double value)
    : grid_(grid), values_(grid.size(), value) {}

ScalarField::ScalarField(const GridSpec& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error("scalar field: size does not match grid");
}

double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }
double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }

std::size_t ScalarField::argmax() const {
  return static_cast<std::size_t>(std::max_element(values_.begin(), values_.end()) - values_.begin());
}

std::size_t ScalarField::argmin() const {
  return static_cast<std::size_t>(std::min_element(values_.begin(), values_.end()) - values_.begin());
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

MetricField::MetricField(const GridSpec& grid)
    : grid_(grid), data_(grid.size() * static_cast<std::size_t>(grid.n() * grid.n()), 0.0) {}

MetricField::MetricField(const GridSpec& grid, const Hermitian& constant) : MetricField(grid) {
  if (constant.n() != grid.n()) throw Error("metric field: matrix size does not match grid");
  for (std::size_t i = 0; i < size(); ++i) set(i, constant);
}

Hermitian MetricField::at(std::size_t i) const noexcept {
  if (grid_.n() == 1) return Hermitian::make(1, data_[i]);
  const double* p = &data_[4 * i];
  return Hermitian::make(2, p[0], p[1], Complex(p[2], p[3]));
}

void MetricField::set(std::size_t i, const Hermitian& g) noexcept {
  if (grid_.n() == 1) {
    data_[i] = g.diag(0);
    return;
  }
  double* p = &data_[4 * i];
  p[0] = g.diag(0);
  p[1] = g.diag(1);
  p[2] = g.off().real();
  p[3] = g.off().imag();
}

std::pair<double, std::size_t> MetricField::min_eigenvalue() const {
  double best = std::numeric_limits<double>::infinity();
  std::size_t where = 0;
  for (std::size_t i = 0; i < size(); ++i) {
    const double e = at(i).min_eigenvalue();
    if (!(e >= best)) {
      best = e;
      where = i;
    }
  }
  return {best, where};
}

void MetricField::require_positive() const {
  const auto [e, where] = min_eigenvalue();
  if (!(e > 0.0)) throw NonPositiveMetric(where, e);
}

MetricField& MetricField::operator+=(const Hermitian& c) {
  for (std::size_t i = 0; i < size(); ++i) set(i, at(i) + c);
  return *this;
}

BackgroundGeometry::BackgroundGeometry(const GridSpec& grid, const Hermitian& omega_x,
                                       const Hermitian& chi, double t)
    : grid_(grid), omega_x_(omega_x), chi_(chi), t_(t) {
  if (omega_x.n() != grid.n() || chi.n() != grid.n())
    throw ConfigInvalid("background: form size does not match grid");
  if (!(t > 0.0 && t <= 1.0)) throw ConfigInvalid("background: t must lie in (0, 1]");
  if (!(omega_x.min_eigenvalue() > 0.0)) throw ConfigInvalid("background: omega_X must be positive definite");
  if (chi.min_eigenvalue() < -1e-14) throw ConfigInvalid("background: chi must be positive semidefinite");
  volume_ = volume_density(omega_x_);
  volume_t_ = volume_density(omega_hat());
  volume_0_ = volume_density(chi_);
}

BackgroundGeometry BackgroundGeometry::fixed_class(const GridSpec& grid) {
  const Hermitian id = Hermitian::identity(grid.n());
  return BackgroundGeometry(grid, id, id * 0.5, 0.5);
}

}  // namespace kgl
