#include "kgl/laplacian.hpp"

#include <cmath>
#include <numeric>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

double l1(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += std::abs(x);
  return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

void remove_mean(std::span<double> v) {
  const double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  for (double& x : v) x -= m;
}

}  // namespace

LaplacianOperator::LaplacianOperator(const MetricField& metric, Preconditioner preconditioner)
    : grid_(metric.grid()), metric_(metric), mass_(metric.grid()), kind_(preconditioner) {
  metric.require_positive();
  const int n = grid_.n();
  const std::size_t N = grid_.size();
  const std::size_t stride = n == 1 ? 1 : 4;
  coef_.assign(N * stride, 0.0);
  const double cell = grid_.cell_volume();
  for (std::size_t i = 0; i < N; ++i) {
    const Hermitian g = metric.at(i);
    const double mu = volume_density(g) * cell;
    mass_[i] = mu;
    const Hermitian inv = g.inverse();
    double* c = &coef_[i * stride];
    if (n == 1) {
      c[0] = 0.25 * mu * inv.diag(0);
    } else {
      c[0] = 0.25 * mu * inv.diag(0);
      c[1] = 0.25 * mu * inv.diag(1);
      c[2] = 0.25 * mu * inv.off().real();
      c[3] = 0.25 * mu * inv.off().imag();
    }
    for (std::size_t k = 0; k < stride; ++k) mean_coef_[k] += c[k];
  }
  for (std::size_t k = 0; k < stride; ++k) mean_coef_[k] /= static_cast<double>(N);
  volume_ = std::accumulate(mass_.values().begin(), mass_.values().end(), 0.0);

  if (kind_ == Preconditioner::fft) {
    fft_ = std::make_unique<PeriodicFFT>(grid_);
    inverse_symbol_ = fft_->tabulate([this](const std::array<double, 4>& th) {
      const double s = mean_symbol(th);
      return s > 0.0 ? 1.0 / s : 0.0;
    });
    inverse_symbol_[0] = 0.0;
  } else if (kind_ == Preconditioner::jacobi) {
    inverse_diagonal_.resize(N);
    const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
    for (std::size_t y = 0; y < N; ++y) {
      double d = 0.0;
      for (int a = 0; a < grid_.axes(); ++a) {
        const std::size_t ym = grid_.shift(y, a, -1), yp = grid_.shift(y, a, 1);
        d += 0.5 * (diag_weight(ym, a) + diag_weight(y, a)) + 0.5 * (diag_weight(y, a) + diag_weight(yp, a));
      }
      inverse_diagonal_[y] = 1.0 / (d * inv_h2);
    }
  }
}

LaplacianOperator::~LaplacianOperator() = default;
LaplacianOperator::LaplacianOperator(LaplacianOperator&&) noexcept = default;
LaplacianOperator& LaplacianOperator::operator=(LaplacianOperator&&) noexcept = default;

double LaplacianOperator::diag_weight(std::size_t i, int axis) const noexcept {
  if (grid_.n() == 1) return coef_[i];
  return coef_[i * 4 + static_cast<std::size_t>(axis / 2)];
}

double LaplacianOperator::mean_symbol(const std::array<double, 4>& th) const {
  const double inv_h2 = 1.0 / (grid_.h() * grid_.h());
  auto s2 = [](double t) { const double s = std::sin(0.5 * t); return 4.0 * s * s; };
  if (grid_.n() == 1) return inv_h2 * mean_coef_[0] * (s2(th[0]) + s2(th[1]));
  const double w1 = mean_coef_[0], w2 = mean_coef_[1], p = mean_coef_[2], q = mean_coef_[3];
  const double s0 = std::sin(th[0]), s1 = std::sin(th[1]), sa = std::sin(th[2]), sb = std::sin(th[3]);
  const double diag = w1 * (s2(th[0]) + s2(th[1])) + w2 * (s2(th[2]) + s2(th[3]));
  const double mixed = 2.0 * (p * (s0 * sa + s1 * sb) + q * (s0 * sb - s1 * sa));
  return inv_h2 * (diag + mixed);
}

void LaplacianOperator::apply(std::span<const double> u, std::span<double> out) const {
  const GridSpec& g = grid_;
  const std::size_t N = g.size();
  const int d = g.axes();
  const double inv_h2 = 1.0 / (g.h() * g.h());
  // flux[a][x] = edge weight * forward difference; mixed[a][x] = sum_b W_ab c_b.
  std::vector<double> flux(N * static_cast<std::size_t>(d));
  std::vector<double> mixed;
  if (g.n() == 2) mixed.resize(N * 4);
  for (std::size_t x = 0; x < N; ++x) {
    std::array<double, 4> c{};
    for (int a = 0; a < d; ++a) {
      const std::size_t xp = g.shift(x, a, 1);
      const double w = 0.5 * (diag_weight(x, a) + diag_weight(xp, a));
      flux[static_cast<std::size_t>(a) * N + x] = w * (u[xp] - u[x]);
      if (g.n() == 2) c[a] = 0.5 * (u[xp] - u[g.shift(x, a, -1)]);
    }
    if (g.n() == 2) {
      const double p = coef_[x * 4 + 2], q = coef_[x * 4 + 3];
      double* m = &mixed[x * 4];
      m[0] = p * c[2] + q * c[3];
      m[1] = p * c[3] - q * c[2];
      m[2] = p * c[0] - q * c[1];
      m[3] = p * c[1] + q * c[0];
    }
  }
  for (std::size_t y = 0; y < N; ++y) {
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      const std::size_t ym = g.shift(y, a, -1);
      const std::size_t A = static_cast<std::size_t>(a) * N;
      s += flux[A + ym] - flux[A + y];
      if (g.n() == 2) s += 0.5 * (mixed[ym * 4 + a] - mixed[g.shift(y, a, 1) * 4 + a]);
    }
    out[y] = s * inv_h2;
  }
}

ScalarField LaplacianOperator::apply(const ScalarField& u) const {
  if (!(u.grid() == grid_)) throw Error("laplacian: field lives on a different grid");
  ScalarField out(grid_);
  apply(u.values(), out.values());
  return out;
}

ScalarField LaplacianOperator::laplacian(const ScalarField& u) const {
  ScalarField out = apply(u);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = -out[i] / mass_[i];
  return out;
}

void LaplacianOperator::precondition(std::span<const double> r, std::span<double> z) const {
  switch (kind_) {
    case Preconditioner::fft:
      fft_->filter(r, inverse_symbol_, z);
      break;
    case Preconditioner::jacobi:
      for (std::size_t i = 0; i < r.size(); ++i) z[i] = r[i] * inverse_diagonal_[i];
      break;
    case Preconditioner::none:
      std::copy(r.begin(), r.end(), z.begin());
      break;
  }
  remove_mean(z);
}

CgResult LaplacianOperator::solve(std::span<const double> b_in, std::span<double> x, double tol,
                                  int max_iter) const {
  const std::size_t N = grid_.size();
  std::vector<double> b(b_in.begin(), b_in.end());
  remove_mean(b);
  remove_mean(x);
  const double bnorm = l1(b);
  CgResult res;
  if (bnorm == 0.0) {
    std::fill(x.begin(), x.end(), 0.0);
    res.converged = true;
    return res;
  }
  std::vector<double> r(N), z(N), p(N), Ap(N);
  // Restart from the true residual when the recurrence has drifted.
  for (int restart = 0; restart < 3 && res.iterations < max_iter; ++restart) {
    apply(x, Ap);
    for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - Ap[i];
    remove_mean(r);
    res.residual = l1(r) / bnorm;
    if (res.residual <= tol) {
      res.converged = true;
      break;
    }
    precondition(r, z);
    p = z;
    double rz = dot(r, z);
    while (res.iterations < max_iter) {
      apply(p, Ap);
      const double pAp = dot(p, Ap);
      if (!(pAp > 0.0)) break;
      const double alpha = rz / pAp;
      for (std::size_t i = 0; i < N; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * Ap[i];
      }
      remove_mean(r);
      ++res.iterations;
      if (l1(r) / bnorm <= tol) break;
      precondition(r, z);
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
    }
  }
  remove_mean(x);
  apply(x, Ap);
  for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - Ap[i];
  res.residual = l1(r) / bnorm;
  res.converged = res.residual <= tol;
  return res;
}

}  // namespace kgl
