#pragma once

#include <vector>

#include "kgl/verifier.hpp"

namespace kgl {

/// Radial model on the C^n chart, rho = |z|^2:
///   e^F = a^n (a rho + delta) / (rho + delta)^{n - an + 1},
///   phi_delta = (rho + delta)^a.
struct RadialProfile {
  double a = 0.4;
  double delta = 1e-2;
  int n = 2;
  double zeta = 0.0;
  double p = 1.5;

  void validate() const;
};

/// Root of r^{2a} = 2 log(1 + r^2) in (0, 1): where the inner branch meets
/// the outer one at delta = 0.
double solve_zeta(double a);

double radial_F(double rho, double a, double delta, int n);
/// |grad F|^2 = rho F'(rho)^2.
double radial_grad_F_sq(double rho, double a, double delta, int n);

/// I_p(delta) = int_{|z| < zeta} |grad F|^p e^F dV by adaptive quadrature in
/// log rho. Throws QuadratureFailure when the error estimate stays large.
double example31_budget(const RadialProfile& profile);
/// Closed form at delta = 0 (finite iff p < 2an; +inf otherwise).
double budget_limit(double a, int n, double p, double zeta);
/// Fit I(delta) = I0 - C delta^{an - p/2} and return I0.
double budget_extrapolation(const std::vector<double>& deltas, const std::vector<double>& budgets, double a,
                            int n, double p);

/// sup over 0 < rho <= zeta^2 of a (rho + delta)^{a-1} sqrt(rho), by
/// bounded scalar maximisation.
double sup_gradient(double a, double delta, double zeta);
/// a [n + (a - 1) rho/(rho + delta)] / (rho + delta)^{1-a} at rho = delta.
double trace_at_delta(double a, double delta, int n);

struct SharpnessRow {
  double a = 0.0;
  int n = 0;
  double p = 0.0;
  double delta = 0.0;
  double budget = 0.0;
  double sup_grad = 0.0;
  double trace = 0.0;
};

struct SharpnessSummary {
  std::vector<SharpnessRow> rows;
  double zeta = 0.0;
  double budget_limit = 0.0;
  /// (max - min) / max of I_p over the sweep.
  double budget_variation = 0.0;
  PowerFit grad_fit;
  PowerFit trace_fit;
};

SharpnessSummary run_sharpness(double a, int n, double p, const std::vector<double>& deltas);

/// Log-log slope of sup |grad phi_delta| (rate a - 1/2).
PowerFit example31_blowup(double a, int n, const std::vector<double>& deltas);
/// Log-log slope of the trace at rho = delta (rate a - 1).
PowerFit example32_blowup(double a, int n, const std::vector<double>& deltas);

}  // namespace kgl
