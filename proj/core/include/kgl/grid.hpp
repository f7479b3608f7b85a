#pragma once

// Periodic lattices over the flat torus C^n / (Z + iZ)^n and the fields that
// live on them.
//
// Real axes are ordered (x_1, y_1, ..., x_n, y_n) with z_j = x_j + i y_j and
// every coordinate in [0, 1). Point indices are row-major over that axis
// order, so y_n is the fastest-varying axis.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace kgl {

using Complex = std::complex<double>;

class GridSpec {
 public:
  /// n in {1, 2}; m a power of two, at least 8.
  GridSpec(int n, int m);

  int n() const noexcept { return n_; }
  int m() const noexcept { return m_; }
  int axes() const noexcept { return 2 * n_; }
  double h() const noexcept { return 1.0 / m_; }
  /// h^{2n}, the coordinate volume of one cell.
  double cell_volume() const noexcept { return cell_volume_; }
  std::size_t size() const noexcept { return size_; }

  std::size_t stride(int axis) const noexcept { return strides_[axis]; }
  int coord(std::size_t index, int axis) const noexcept {
    return static_cast<int>((index / strides_[axis]) % static_cast<std::size_t>(m_));
  }
  /// Neighbour of `index` displaced by `delta` cells along `axis`, wrapping.
  std::size_t shift(std::size_t index, int axis, int delta) const noexcept;
  std::size_t index(std::span<const int> coords) const;
  /// Position of a point along one real axis, in [0, 1).
  double position(std::size_t index, int axis) const noexcept {
    return coord(index, axis) * h();
  }

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.n_ == b.n_ && a.m_ == b.m_;
  }

 private:
  int n_;
  int m_;
  std::size_t size_;
  double cell_volume_;
  std::array<std::size_t, 4> strides_{};
};

/// Hermitian n x n matrix with n <= 2, stored by its independent entries so
/// that Hermiticity holds exactly.
class Hermitian {
 public:
  Hermitian() = default;
  explicit Hermitian(int n) : n_(n) {}
  static Hermitian identity(int n);
  static Hermitian scalar(int n, double value);
  /// diag(d0, d1) with off-diagonal g_{1 2bar} = off (n = 2 only).
  static Hermitian make(int n, double d0, double d1 = 0.0, Complex off = {});

  int n() const noexcept { return n_; }
  double diag(int i) const noexcept { return d_[i]; }
  /// g_{1 2bar}; g_{2 1bar} is its conjugate.
  Complex off() const noexcept { return off_; }
  Complex operator()(int i, int j) const noexcept;

  double trace() const noexcept;
  double det() const noexcept;
  double min_eigenvalue() const noexcept;
  double max_eigenvalue() const noexcept;
  Hermitian inverse() const;
  /// Trace of (this^{-1} * other), computed without forming the inverse.
  double trace_against(const Hermitian& other) const;

  Hermitian operator+(const Hermitian& o) const noexcept;
  Hermitian operator-(const Hermitian& o) const noexcept;
  Hermitian operator*(double s) const noexcept;

 private:
  int n_ = 1;
  std::array<double, 2> d_{};
  Complex off_{};
};

/// Real density of omega^n against dx_1 dy_1 ... dx_n dy_n: 2^n n! det(g).
double volume_density(const Hermitian& g) noexcept;
double volume_factor(int n) noexcept;

class ScalarField {
 public:
  explicit ScalarField(const GridSpec& grid, double value = 0.0);
  ScalarField(const GridSpec& grid, std::vector<double> values);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& operator[](std::size_t i) noexcept { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double max() const;
  double min() const;
  std::size_t argmax() const;
  std::size_t argmin() const;
  bool all_finite() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Hermitian matrix per grid point (components g_{i jbar}).
class MetricField {
 public:
  explicit MetricField(const GridSpec& grid);
  MetricField(const GridSpec& grid, const Hermitian& constant);

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }
  /// Independent real components per point: n^2.
  int components() const noexcept { return grid_.n() * grid_.n(); }

  Hermitian at(std::size_t i) const noexcept;
  void set(std::size_t i, const Hermitian& g) noexcept;

  std::span<const double> raw() const noexcept { return data_; }
  std::span<double> raw() noexcept { return data_; }

  /// Smallest eigenvalue over the grid and where it is attained.
  std::pair<double, std::size_t> min_eigenvalue() const;
  /// Throws NonPositiveMetric unless every point is positive definite.
  void require_positive() const;

  MetricField& operator+=(const Hermitian& constant);

 private:
  GridSpec grid_;
  std::vector<double> data_;
};

/// Reference metric omega_X, class data chi and t, and the derived volumes.
/// Both forms are constant on the torus.
class BackgroundGeometry {
 public:
  BackgroundGeometry(const GridSpec& grid, const Hermitian& omega_x,
                     const Hermitian& chi, double t);
  /// omega_X = identity, chi = omega_X / 2, t = 1/2: the fixed-class case.
  static BackgroundGeometry fixed_class(const GridSpec& grid);

  const GridSpec& grid() const noexcept { return grid_; }
  const Hermitian& omega_x() const noexcept { return omega_x_; }
  const Hermitian& chi() const noexcept { return chi_; }
  double t() const noexcept { return t_; }
  /// chi + t omega_X.
  Hermitian omega_hat() const noexcept { return chi_ + omega_x_ * t_; }

  double volume() const noexcept { return volume_; }
  double volume_t() const noexcept { return volume_t_; }
  double volume_0() const noexcept { return volume_0_; }
  double c_t() const noexcept { return volume_t_ / volume_; }
  /// Lower bound of the bisectional curvature of omega_X (flat: 0).
  double curvature_bound() const noexcept { return 0.0; }

  MetricField omega_x_field() const { return MetricField(grid_, omega_x_); }
  MetricField omega_hat_field() const { return MetricField(grid_, omega_hat()); }

 private:
  GridSpec grid_;
  Hermitian omega_x_;
  Hermitian chi_;
  double t_;
  double volume_;
  double volume_t_;
  double volume_0_;
};

}  // namespace kgl
