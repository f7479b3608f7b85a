#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kgl/functionals.hpp"
#include "kgl/green.hpp"
#include "kgl/ma_solver.hpp"

namespace kgl {

using NamedValues = std::vector<std::pair<std::string, double>>;

/// One measured inequality. `margin` is the room left in the inequality
/// (bound - value for upper bounds, value - bound for lower bounds), and
/// pass <=> margin >= -tolerance.
struct VerificationReport {
  std::string check;
  NamedValues coordinates;
  NamedValues quantities;
  double value = 0.0;
  double bound = 0.0;
  bool lower_bound = false;
  double margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  static VerificationReport upper(std::string check, double value, double bound, double tolerance);
  static VerificationReport lower(std::string check, double value, double bound, double tolerance);
  double quantity(const std::string& name) const;
};

/// (1 / 2V_t) ||G||_1 <= -inf G, plus rho = -inf G / (1 + ||G||_1).
VerificationReport check_theorem1(const GreenField& green, const LaplacianOperator& op);

/// Per-source quantities of the uniform bounds.
struct GreenBounds {
  double l1 = 0.0;        // ||G||_{L1(omega_t^n)}
  double neg_inf = 0.0;   // -inf G
  double lq = 0.0;        // int |G|^q omega_t^n
  double grad_ls = 0.0;   // int |grad G|^s omega_t^n
  double q = 0.0;
  double s = 0.0;
};

/// q = n/(n-1) - delta (q = 3 for n = 1), s = 2n/(2n-1) - delta.
double theorem2_q(int n, double delta);
double theorem2_s(int n, double delta);
GreenBounds green_bounds(const GreenField& green, const LaplacianOperator& op, double delta);

/// Maxima over sources for one sweep member. Throws ClassViolation when
/// `in_class` is false.
VerificationReport check_theorem2(const std::vector<GreenField>& greens, const LaplacianOperator& op,
                                  bool in_class, double delta);

/// max/median of `values` <= factor.
VerificationReport check_uniformity(const std::string& name, const std::vector<double>& values,
                                    double factor = 3.0);

/// beta * int |grad Gpos|^2 Gpos^{-1-beta} omega_t^n <= 1 within tol_disc.
VerificationReport check_gradient_identity(const GreenField& green, const LaplacianOperator& op,
                                           double beta, double tol_disc = 0.05);

struct DeGiorgiFit {
  std::vector<double> s_grid;
  std::vector<double> phi;
  double C6 = 0.0;
  double delta0 = 0.0;
  double s0 = 0.0;
  double S_inf = 0.0;
  double sup_v = 0.0;
  /// L1 rescaling factor applied to v (1 if none was needed).
  double rescale = 1.0;
  bool pass = false;
};

/// delta0 = (p - n) / (n p).
double degiorgi_delta0(double p, int n);

/// v is rescaled to ||v||_{L1(omega_t^n)} <= V_0 first; phi(s) uses e^F omega_X^n.
/// Throws RecursionViolated when no finite C6 fits, ConfigInvalid when p <= n.
DeGiorgiFit check_degiorgi(const ScalarField& v, const ScalarField& F, const BackgroundGeometry& background,
                           const MetricField& omega_t, double p);

/// v = -G of a computed Green function, with F the relative volume of omega_t.
DeGiorgiFit check_degiorgi_green(const GreenField& green, const LaplacianOperator& op,
                                 const BackgroundGeometry& background, double p);

VerificationReport to_report(const DeGiorgiFit& fit);

/// sup |u - avg u| <= C ||grad u||_{L^p}, C = max over greens of
/// ||grad G||_{L^{p*}}. Callers include the extremal points of u among the
/// sources so that the sup is witnessed.
VerificationReport check_sobolev_morrey(const std::vector<GreenField>& greens, const LaplacianOperator& op,
                                        const ScalarField& u, double p);

/// (A + kappa/n)^{-n} e^{-A osc_phi}.
double chengli_floor(double A, double kappa, int n, double osc_phi);

/// inf e^F >= (A + kappa/n)^{-n} e^{-A osc phi} with kappa = max(0, -min R).
VerificationReport check_chengli_corollary(const MASolution& solution, const BackgroundGeometry& background,
                                           double A = 1.0, double tolerance = 1e-6);

struct SweepSample {
  NamedValues coordinates;
  double budget = 0.0;
  double sup_H = 0.0;
  double sup_Q = 0.0;
  double sup_S = 0.0;
};

/// Budget drift plus max/median of sup H, sup Q, sup |S|^2 across the sweep.
/// Throws BudgetDrift when the budget moves more than `drift` relatively.
std::vector<VerificationReport> check_apriori_sweeps(const std::vector<SweepSample>& samples,
                                                     double factor = 3.0, double drift = 0.1);

struct PowerFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least squares of log y against log x.
PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y);

/// Upper bound for 1 + 1/r_l after l steps of the L^q iteration:
/// 1 + 1/(n-1) - 1/(n^{l+1} (n-1)); tends to n/(n-1).
double lq_exponent_bound(int n, int level);

}  // namespace kgl
