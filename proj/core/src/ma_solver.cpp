#include "kgl/ma_solver.hpp"

#include <cmath>
#include <numeric>

#include "kgl/errors.hpp"
#include "kgl/fft.hpp"
#include "kgl/geometry.hpp"
#include "kgl/laplacian.hpp"

namespace kgl {
namespace {

double max_abs_centered(const ScalarField& r, const ScalarField& mu, double& mean) {
  mean = integrate(r, mu) / std::accumulate(mu.values().begin(), mu.values().end(), 0.0);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) worst = std::max(worst, std::abs(r[i] - mean));
  return worst;
}

bool strictly_positive(const MetricField& g) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Hermitian h = g.at(i);
    if (!(h.min_eigenvalue() > 1e-8 * h.trace())) return false;
  }
  return true;
}

void sup_normalize(ScalarField& phi) {
  const double top = phi.max();
  for (std::size_t i = 0; i < phi.size(); ++i) phi[i] -= top;
}

MASolution finish(const MAProblem& problem, ScalarField phi, int iterations, std::vector<double> damping,
                  std::vector<double> history) {
  sup_normalize(phi);
  MASolution sol{phi, metric_from_potential(problem.background.omega_hat(), phi), 0.0, 0.0, iterations,
                 std::move(damping), std::move(history)};
  const ScalarField r = ma_residual(sol.metric, problem);
  sol.residual = max_abs_centered(r, volume_weights(sol.metric), sol.normalizer);
  return sol;
}

MASolution solve_poisson_n1(const MAProblem& problem) {
  const GridSpec& g = problem.F.grid();
  const double ghat = problem.background.omega_hat().diag(0);
  std::vector<double> rhs(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rhs[i] = 4.0 * ghat * std::expm1(problem.F[i]);
  const double mean = std::accumulate(rhs.begin(), rhs.end(), 0.0) / static_cast<double>(rhs.size());
  for (double& v : rhs) v -= mean;
  PeriodicFFT fft(g);
  const double h2 = g.h() * g.h();
  auto inverse = fft.tabulate([h2](const std::array<double, 4>& th) {
    const double s = 4.0 * (std::pow(std::sin(0.5 * th[0]), 2) + std::pow(std::sin(0.5 * th[1]), 2)) / h2;
    return s > 0.0 ? -1.0 / s : 0.0;
  });
  inverse[0] = 0.0;
  ScalarField phi(g);
  fft.filter(rhs, inverse, phi.values());
  return finish(problem, std::move(phi), 1, {1.0}, {});
}

}  // namespace

void MAProblem::validate() const {
  if (!(F.grid() == background.grid())) throw ConfigInvalid("ma problem: F and background grids differ");
  if (!F.all_finite()) throw ConfigInvalid("ma problem: F has non-finite values");
  const double mu_x = volume_density(background.omega_x()) * F.grid().cell_volume();
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) s += std::exp(F[i]) * mu_x;
  if (std::abs(s / background.volume() - 1.0) > 1e-10)
    throw ConfigInvalid("ma problem: e^F is not normalised against omega_X^n");
}

ScalarField normalize_density(const ScalarField& F, const BackgroundGeometry& background) {
  const double mu_x = volume_density(background.omega_x()) * F.grid().cell_volume();
  // Factor out the max before exponentiating so deep profiles do not overflow.
  const double top = F.max();
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) s += std::exp(F[i] - top) * mu_x;
  const double shift = top + std::log(s / background.volume());
  ScalarField out = F;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= shift;
  return out;
}

MASolution solution_from_potential(const MAProblem& problem, ScalarField phi) {
  if (!(phi.grid() == problem.F.grid())) throw ConfigInvalid("ma problem: potential on the wrong grid");
  return finish(problem, std::move(phi), 0, {}, {});
}

ScalarField ma_residual(const MetricField& metric, const MAProblem& problem) {
  const double ref = std::log(problem.background.omega_x().det()) + std::log(problem.background.c_t());
  ScalarField r(metric.grid());
  for (std::size_t i = 0; i < r.size(); ++i) r[i] = std::log(metric.at(i).det()) - ref - problem.F[i];
  return r;
}

MASolution solve_ma(const MAProblem& problem, double tol, int max_iter, const SolverSettings& settings) {
  problem.validate();
  if (!(tol > 0.0)) throw ConfigInvalid("ma solver: tolerance must be positive");
  const GridSpec& g = problem.F.grid();
  if (g.n() == 1 && !settings.force_newton) return solve_poisson_n1(problem);

  const Hermitian omega_hat = problem.background.omega_hat();
  ScalarField phi = settings.initial_guess ? *settings.initial_guess : ScalarField(g);
  if (!(phi.grid() == g)) throw ConfigInvalid("ma solver: initial guess lives on a different grid");

  MetricField metric = metric_from_potential(omega_hat, phi);
  if (!strictly_positive(metric)) throw LeftKahlerCone("ma solver: initial guess is outside the Kahler cone");
  double mean = 0.0;
  ScalarField r = ma_residual(metric, problem);
  double res = max_abs_centered(r, volume_weights(metric), mean);
  std::vector<double> damping;
  std::vector<double> history{res};

  int it = 0;
  while (res > tol) {
    if (it >= max_iter) throw NotConverged("monge-ampere newton", it, res);
    ++it;
    const LaplacianOperator op(metric);
    std::vector<double> b(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) b[i] = op.mass()[i] * (r[i] - mean);
    ScalarField delta(g);
    op.solve(b, delta.values(), settings.cg_tol, settings.cg_max_iter);

    double alpha = 1.0;
    bool positive_seen = false;
    bool accepted = false;
    for (int k = 0; k <= settings.max_backtracks; ++k, alpha *= 0.5) {
      ScalarField trial = phi;
      for (std::size_t i = 0; i < g.size(); ++i) trial[i] += alpha * delta[i];
      MetricField trial_metric = metric_from_potential(omega_hat, trial);
      if (!strictly_positive(trial_metric)) continue;
      positive_seen = true;
      double trial_mean = 0.0;
      ScalarField trial_r = ma_residual(trial_metric, problem);
      const double trial_res = max_abs_centered(trial_r, volume_weights(trial_metric), trial_mean);
      if (trial_res <= res) {
        phi = std::move(trial);
        metric = std::move(trial_metric);
        r = std::move(trial_r);
        mean = trial_mean;
        res = trial_res;
        accepted = true;
        break;
      }
    }
    if (!positive_seen) throw LeftKahlerCone("ma solver: no damping keeps the metric positive definite");
    if (!accepted) throw NotConverged("monge-ampere newton (stalled)", it, res);
    damping.push_back(alpha);
    history.push_back(res);
  }
  return finish(problem, std::move(phi), it, std::move(damping), std::move(history));
}

}  // namespace kgl
