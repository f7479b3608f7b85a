#pragma once

#include <optional>
#include <vector>

#include "kgl/grid.hpp"

namespace kgl {

/// (chi + t omega_X + i ddbar phi)^n = c_t e^F omega_X^n, sup phi = 0.
struct MAProblem {
  BackgroundGeometry background;
  ScalarField F;

  /// Throws ConfigInvalid unless F is finite, on the background grid, and
  /// |(1/V) sum e^F mu_X - 1| <= 1e-10.
  void validate() const;
};

/// Shift F by a constant so that sum e^F mu_X = V.
ScalarField normalize_density(const ScalarField& F, const BackgroundGeometry& background);

struct SolverSettings {
  /// Relative l1 tolerance of the inner linear solves.
  double cg_tol = 1e-4;
  int cg_max_iter = 4000;
  /// Take the Newton path for n = 1 instead of the direct Poisson solve.
  bool force_newton = false;
  int max_backtracks = 30;
  /// Warm start (any additive constant is ignored).
  std::optional<ScalarField> initial_guess;
};

struct MASolution {
  ScalarField phi;
  MetricField metric;
  /// max |log det(g_phi)/det(g_X) - F - log c_t - normalizer|.
  double residual = 0.0;
  /// mu-weighted mean of the log-determinant residual at exit.
  double normalizer = 0.0;
  int iterations = 0;
  std::vector<double> newton_damping_history;
  /// Residual after each accepted step, starting with the initial guess.
  std::vector<double> residual_history;
};

/// Damped quasi-Newton iteration; for n = 1 a single spectral Poisson solve.
/// Errors: NotConverged, LeftKahlerCone.
MASolution solve_ma(const MAProblem& problem, double tol, int max_iter, const SolverSettings& settings = {});

/// Rebuild metric and residual from a stored potential (sup-normalised on
/// the way in). Iteration counts and histories are left empty.
MASolution solution_from_potential(const MAProblem& problem, ScalarField phi);

/// Log-determinant residual field r = log det g - log det g_X - F - log c_t.
ScalarField ma_residual(const MetricField& metric, const MAProblem& problem);

}  // namespace kgl
