#include "kgl/geometry.hpp"

#include <cmath>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

// Real second derivative d^2 u / (dr_a dr_b) at point i: compact 3-point
// stencil on the diagonal, centred 4-point stencil off it.
double second_difference(const GridSpec& g, std::span<const double> u, std::size_t i, int a, int b) {
  const double h = g.h();
  if (a == b) {
    return (u[g.shift(i, a, 1)] - 2.0 * u[i] + u[g.shift(i, a, -1)]) / (h * h);
  }
  const std::size_t pa = g.shift(i, a, 1), ma = g.shift(i, a, -1);
  return (u[g.shift(pa, b, 1)] - u[g.shift(pa, b, -1)] - u[g.shift(ma, b, 1)] +
          u[g.shift(ma, b, -1)]) /
         (4.0 * h * h);
}

Hermitian hessian_at(const GridSpec& g, std::span<const double> u, std::size_t i) {
  // d_i d_jbar = 1/4 [(d_xi d_xj + d_yi d_yj) + i (d_xi d_yj - d_yi d_xj)]
  auto d = [&](int a, int b) { return second_difference(g, u, i, a, b); };
  if (g.n() == 1) return Hermitian::make(1, 0.25 * (d(0, 0) + d(1, 1)));
  const double h11 = 0.25 * (d(0, 0) + d(1, 1));
  const double h22 = 0.25 * (d(2, 2) + d(3, 3));
  const Complex h12(0.25 * (d(0, 2) + d(1, 3)), 0.25 * (d(0, 3) - d(1, 2)));
  return Hermitian::make(2, h11, h22, h12);
}

void require_same_grid(const GridSpec& a, const GridSpec& b) {
  if (!(a == b)) throw Error("fields live on different grids");
}

}  // namespace

MetricField i_del_delbar(const ScalarField& phi) {
  const GridSpec& g = phi.grid();
  MetricField out(g);
  const auto u = phi.values();
  for (std::size_t i = 0; i < g.size(); ++i) out.set(i, hessian_at(g, u, i));
  return out;
}

MetricField metric_from_potential(const Hermitian& omega_hat, const ScalarField& phi) {
  MetricField out = i_del_delbar(phi);
  out += omega_hat;
  return out;
}

ScalarField volume_weights(const MetricField& metric) {
  const GridSpec& g = metric.grid();
  ScalarField mu(g);
  const double cell = g.cell_volume();
  for (std::size_t i = 0; i < g.size(); ++i) mu[i] = volume_density(metric.at(i)) * cell;
  return mu;
}

double integrate(const ScalarField& f, const ScalarField& weights) {
  require_same_grid(f.grid(), weights.grid());
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * weights[i];
  return s;
}

double integrate(const ScalarField& f, const MetricField& volume) {
  require_same_grid(f.grid(), volume.grid());
  const double cell = f.grid().cell_volume();
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * volume_density(volume.at(i)) * cell;
  return s;
}

double total_volume(const MetricField& metric) {
  return integrate(ScalarField(metric.grid(), 1.0), metric);
}

ScalarField ma_determinant_ratio(const MetricField& metric, const BackgroundGeometry& background) {
  require_same_grid(metric.grid(), background.grid());
  metric.require_positive();
  const GridSpec& g = metric.grid();
  const double vol = total_volume(metric);
  const double ref = volume_density(background.omega_x());
  ScalarField F(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    F[i] = std::log(volume_density(metric.at(i)) / vol) - std::log(ref / background.volume());
  }
  return F;
}

std::pair<MetricField, ScalarField> ricci_and_scalar(const MetricField& metric) {
  metric.require_positive();
  const GridSpec& g = metric.grid();
  ScalarField logdet(g);
  for (std::size_t i = 0; i < g.size(); ++i) logdet[i] = std::log(metric.at(i).det());
  MetricField ric = i_del_delbar(logdet);
  ScalarField scalar(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Hermitian r = ric.at(i) * -1.0;
    ric.set(i, r);
    scalar[i] = metric.at(i).trace_against(r);
  }
  return {std::move(ric), std::move(scalar)};
}

std::array<double, 16> real_gradient_form(const Hermitian& g) {
  // g^{-1} = P + iQ; |grad u|^2 = 1/4 [X^T P X + Y^T P Y + 2 X^T Q Y].
  std::array<double, 16> A{};
  const int n = g.n();
  const Hermitian inv = g.inverse();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Complex e = inv(i, j);
      const double p = 0.25 * e.real();
      const double q = 0.25 * e.imag();
      A[(2 * i) * 4 + 2 * j] = p;          // x_i x_j
      A[(2 * i + 1) * 4 + 2 * j + 1] = p;  // y_i y_j
      A[(2 * i) * 4 + 2 * j + 1] = q;      // x_i y_j
      A[(2 * i + 1) * 4 + 2 * j] = -q;     // y_i x_j
    }
  }
  return A;
}

ScalarField metric_gradient_inner(const ScalarField& u, const ScalarField& v, const MetricField& metric) {
  require_same_grid(u.grid(), metric.grid());
  require_same_grid(v.grid(), metric.grid());
  metric.require_positive();
  const GridSpec& g = metric.grid();
  const int d = g.axes();
  const double h = g.h();
  ScalarField out(g);
  std::array<double, 4> fu{}, bu{}, cu{}, fv{}, bv{}, cv{};
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (int a = 0; a < d; ++a) {
      const std::size_t p = g.shift(i, a, 1), m = g.shift(i, a, -1);
      fu[a] = (u[p] - u[i]) / h;
      bu[a] = (u[i] - u[m]) / h;
      cu[a] = 0.5 * (fu[a] + bu[a]);
      fv[a] = (v[p] - v[i]) / h;
      bv[a] = (v[i] - v[m]) / h;
      cv[a] = 0.5 * (fv[a] + bv[a]);
    }
    const auto A = real_gradient_form(metric.at(i));
    double s = 0.0;
    for (int a = 0; a < d; ++a) {
      s += A[a * 4 + a] * 0.5 * (fu[a] * fv[a] + bu[a] * bv[a]);
      for (int b = 0; b < d; ++b)
        if (b != a) s += A[a * 4 + b] * cu[a] * cv[b];
    }
    out[i] = s;
  }
  return out;
}

ScalarField metric_gradient_normsq(const ScalarField& u, const MetricField& metric) {
  ScalarField out = metric_gradient_inner(u, u, metric);
  // Roundoff in the mixed terms can push tiny values below zero.
  for (std::size_t i = 0; i < out.size(); ++i)
    if (out[i] < 0.0) out[i] = 0.0;
  return out;
}

}  // namespace kgl
