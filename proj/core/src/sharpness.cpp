#include "kgl/sharpness.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

double sphere_area(int n) {
  double fact = 1.0;
  for (int k = 2; k < n; ++k) fact *= k;
  return 2.0 * std::pow(std::numbers::pi, n) / fact;
}

double integrate_segment(const std::function<double(double)>& f, double lo, double hi) {
  double err = 0.0, l1 = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, lo, hi, 20, 1e-12, &err, &l1);
  if (!std::isfinite(v) || err > 1e-8 * std::max(l1, 1e-300) + 1e-300)
    throw QuadratureFailure("radial quadrature did not converge on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
  return v;
}

std::vector<double> column(const std::vector<SharpnessRow>& rows, double SharpnessRow::*field) {
  std::vector<double> out;
  for (const auto& r : rows) out.push_back(r.*field);
  return out;
}

}  // namespace

void RadialProfile::validate() const {
  if (!(a > 0.0 && a <= 1.0)) throw ConfigInvalid("radial profile: a must lie in (0, 1]");
  if (!(delta >= 0.0 && delta < 1e-2 + 1e-15)) throw ConfigInvalid("radial profile: delta must lie in [0, 1/100]");
  if (n < 1) throw ConfigInvalid("radial profile: n must be positive");
  if (!(zeta > 0.0 && zeta < 1.0)) throw ConfigInvalid("radial profile: zeta must lie in (0, 1)");
  if (!(p > 0.0)) throw ConfigInvalid("radial profile: p must be positive");
}

double solve_zeta(double a) {
  auto f = [a](double r) { return std::pow(r, 2.0 * a) - 2.0 * std::log1p(r * r); };
  // f > 0 near 0 (r^{2a} dominates r^2) and f(1) = 1 - 2 log 2 < 0.
  double lo = 1e-12, hi = 1.0;
  if (!(f(lo) > 0.0)) throw QuadratureFailure("zeta: no sign change near 0");
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

double radial_F(double rho, double a, double delta, int n) {
  return n * std::log(a) + std::log(a * rho + delta) - (n - a * n + 1.0) * std::log(rho + delta);
}

double radial_grad_F_sq(double rho, double a, double delta, int n) {
  const double d = a / (a * rho + delta) - (n - a * n + 1.0) / (rho + delta);
  return rho * d * d;
}

double budget_limit(double a, int n, double p, double zeta) {
  const double kappa = a * n - 0.5 * p;
  if (!(kappa > 0.0)) return std::numeric_limits<double>::infinity();
  const double K = std::pow(n - a * n, p) * std::pow(a, n + 1) * 0.5 * sphere_area(n);
  return K * std::pow(zeta * zeta, kappa) / kappa;
}

double example31_budget(const RadialProfile& pr) {
  pr.validate();
  if (pr.delta == 0.0) return budget_limit(pr.a, pr.n, pr.p, pr.zeta);
  const double half_sigma = 0.5 * sphere_area(pr.n);
  auto f = [&](double u) {
    const double rho = std::exp(u);
    const double g = std::pow(radial_grad_F_sq(rho, pr.a, pr.delta, pr.n), 0.5 * pr.p);
    return g * std::exp(radial_F(rho, pr.a, pr.delta, pr.n)) * half_sigma * std::pow(rho, pr.n);
  };
  const double top = std::log(pr.zeta * pr.zeta);
  const double knee = std::log(pr.delta);
  // Below rho ~ delta the integrand decays like rho^{n + p/2}.
  std::vector<double> cuts{knee - 60.0, knee - 6.0, knee + 6.0, top};
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = std::min(cuts[k], top), hi = std::min(cuts[k + 1], top);
    if (hi > lo) total += integrate_segment(f, lo, hi);
  }
  return total;
}

double budget_extrapolation(const std::vector<double>& deltas, const std::vector<double>& budgets, double a,
                            int n, double p) {
  const double kappa = a * n - 0.5 * p;
  if (deltas.size() != budgets.size() || deltas.size() < 2) throw Error("extrapolation: need two or more points");
  // Linear least squares of I against x = delta^kappa; intercept is I0.
  const double k = static_cast<double>(deltas.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double x = std::pow(deltas[i], kappa);
    sx += x;
    sy += budgets[i];
    sxx += x * x;
    sxy += x * budgets[i];
  }
  const double slope = (sxy - sx * sy / k) / (sxx - sx * sx / k);
  return (sy - slope * sx) / k;
}

double sup_gradient(double a, double delta, double zeta) {
  auto neg = [a, delta](double u) {
    const double rho = std::exp(u);
    return -a * std::pow(rho + delta, a - 1.0) * std::sqrt(rho);
  };
  const double hi = std::log(zeta * zeta);
  const double lo = std::min(std::log(delta) - 20.0, hi - 1.0);
  boost::uintmax_t iters = 500;
  const auto r = boost::math::tools::brent_find_minima(neg, lo, hi, 52, iters);
  return std::max(-r.second, -neg(hi));
}

double trace_at_delta(double a, double delta, int n) {
  const double rho = delta;
  return a * (n + (a - 1.0) * rho / (rho + delta)) / std::pow(rho + delta, 1.0 - a);
}

SharpnessSummary run_sharpness(double a, int n, double p, const std::vector<double>& deltas) {
  if (deltas.size() < 2) throw ConfigInvalid("sharpness: need at least two deltas");
  SharpnessSummary s;
  s.zeta = solve_zeta(a);
  s.budget_limit = budget_limit(a, n, p, s.zeta);
  for (double d : deltas) {
    const RadialProfile pr{a, d, n, s.zeta, p};
    s.rows.push_back({a, n, p, d, example31_budget(pr), sup_gradient(a, d, s.zeta), trace_at_delta(a, d, n)});
  }
  const auto budgets = column(s.rows, &SharpnessRow::budget);
  const auto [lo, hi] = std::minmax_element(budgets.begin(), budgets.end());
  s.budget_variation = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  s.grad_fit = fit_power_law(deltas, column(s.rows, &SharpnessRow::sup_grad));
  s.trace_fit = fit_power_law(deltas, column(s.rows, &SharpnessRow::trace));
  return s;
}

PowerFit example31_blowup(double a, int /*n*/, const std::vector<double>& deltas) {
  const double zeta = solve_zeta(a);
  std::vector<double> y;
  for (double d : deltas) y.push_back(sup_gradient(a, d, zeta));
  return fit_power_law(deltas, y);
}

PowerFit example32_blowup(double a, int n, const std::vector<double>& deltas) {
  std::vector<double> y;
  for (double d : deltas) y.push_back(trace_at_delta(a, d, n));
  return fit_power_law(deltas, y);
}

}  // namespace kgl
