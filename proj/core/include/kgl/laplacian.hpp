#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kgl/fft.hpp"
#include "kgl/grid.hpp"

namespace kgl {

enum class Preconditioner { fft, jacobi, none };

struct CgResult {
  int iterations = 0;
  /// ||r||_1 / ||b||_1 at exit.
  double residual = 0.0;
  bool converged = false;
};

/// Weak form of -Delta_omega on the periodic grid.
///
/// u^T K u = sum_x mu(x) |grad u|^2_omega(x) with the pointwise norm of
/// metric_gradient_normsq, so K is symmetric positive semidefinite and its
/// kernel is the constants. mu(x) = 2^n n! det g(x) h^{2n}.
class LaplacianOperator {
 public:
  explicit LaplacianOperator(const MetricField& metric,
                             Preconditioner preconditioner = Preconditioner::fft);
  ~LaplacianOperator();
  LaplacianOperator(LaplacianOperator&&) noexcept;
  LaplacianOperator& operator=(LaplacianOperator&&) noexcept;

  const GridSpec& grid() const noexcept { return grid_; }
  const MetricField& metric() const noexcept { return metric_; }
  const ScalarField& mass() const noexcept { return mass_; }
  /// sum of the cell masses.
  double volume() const noexcept { return volume_; }

  void apply(std::span<const double> u, std::span<double> out) const;
  ScalarField apply(const ScalarField& u) const;
  /// Pointwise Delta_omega u = -(K u) / mu.
  ScalarField laplacian(const ScalarField& u) const;
  /// Approximate inverse of K on mean-zero data; output has zero sum.
  void precondition(std::span<const double> r, std::span<double> z) const;

  /// Symbol of K with the coefficients frozen at their grid mean.
  double mean_symbol(const std::array<double, 4>& theta) const;

  /// Deflated PCG for K x = b. b is projected onto zero sum first; x is
  /// used as the initial guess and returned with zero sum. Stops when
  /// ||r||_1 <= tol ||b||_1.
  CgResult solve(std::span<const double> b, std::span<double> x, double tol, int max_iter) const;

 private:
  GridSpec grid_;
  MetricField metric_;
  ScalarField mass_;
  double volume_ = 0.0;
  Preconditioner kind_;
  // Per point: mu * A in compressed form. n = 1: {w}; n = 2: {w_1, w_2, p, q}
  // where the axis pairs (x1,x2), (y1,y2) carry p, (x1,y2) q and (y1,x2) -q.
  std::vector<double> coef_;
  std::array<double, 4> mean_coef_{};
  std::unique_ptr<PeriodicFFT> fft_;
  std::vector<double> inverse_symbol_;
  std::vector<double> inverse_diagonal_;

  double diag_weight(std::size_t i, int axis) const noexcept;
};

}  // namespace kgl
