#include "kgl/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kgl/errors.hpp"
#include "kgl/geometry.hpp"

namespace kgl {
namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size();
  return k % 2 == 1 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

double l1_norm(const ScalarField& f, const ScalarField& mu) {
  double s = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) s += std::abs(f[i]) * mu[i];
  return s;
}

}  // namespace

VerificationReport VerificationReport::upper(std::string check, double value, double bound, double tolerance) {
  VerificationReport r;
  r.check = std::move(check);
  r.value = value;
  r.bound = bound;
  r.margin = bound - value;
  r.tolerance = tolerance;
  r.pass = r.margin >= -tolerance;
  return r;
}

VerificationReport VerificationReport::lower(std::string check, double value, double bound, double tolerance) {
  VerificationReport r = upper(std::move(check), value, bound, tolerance);
  r.lower_bound = true;
  r.margin = value - bound;
  r.pass = r.margin >= -tolerance;
  return r;
}

double VerificationReport::quantity(const std::string& name) const {
  for (const auto& [k, v] : quantities)
    if (k == name) return v;
  throw Error("report '" + check + "' has no quantity '" + name + "'");
}

VerificationReport check_theorem1(const GreenField& green, const LaplacianOperator& op) {
  const double vt = op.volume();
  const double l1 = l1_norm(green.G, op.mass());
  const double neg_inf = -green.G.min();
  VerificationReport r = VerificationReport::upper("theorem1_lower_chain", l1 / (2.0 * vt), neg_inf, 1e-9);
  r.quantities = {{"source", static_cast<double>(green.source)},
                  {"l1", l1},
                  {"neg_inf", neg_inf},
                  {"V_t", vt},
                  {"ratio", neg_inf / (1.0 + l1)}};
  r.note = "upper chain constant is non-constructive; ratio is aggregated across sweeps";
  return r;
}

double theorem2_q(int n, double delta) { return n == 1 ? 3.0 : static_cast<double>(n) / (n - 1) - delta; }

double theorem2_s(int n, double delta) { return 2.0 * n / (2.0 * n - 1.0) - delta; }

GreenBounds green_bounds(const GreenField& green, const LaplacianOperator& op, double delta) {
  const int n = op.grid().n();
  GreenBounds b;
  b.q = theorem2_q(n, delta);
  b.s = theorem2_s(n, delta);
  const ScalarField& mu = op.mass();
  b.l1 = l1_norm(green.G, mu);
  b.neg_inf = -green.G.min();
  for (std::size_t i = 0; i < mu.size(); ++i) {
    b.lq += std::pow(std::abs(green.G[i]), b.q) * mu[i];
    b.grad_ls += std::pow(green.gradnorm[i], b.s) * mu[i];
  }
  return b;
}

VerificationReport check_theorem2(const std::vector<GreenField>& greens, const LaplacianOperator& op,
                                  bool in_class, double delta) {
  if (!in_class) throw ClassViolation("theorem 2: sweep member is outside the declared class");
  GreenBounds worst;
  for (const GreenField& g : greens) {
    const GreenBounds b = green_bounds(g, op, delta);
    worst.q = b.q;
    worst.s = b.s;
    worst.l1 = std::max(worst.l1, b.l1);
    worst.neg_inf = std::max(worst.neg_inf, b.neg_inf);
    worst.lq = std::max(worst.lq, b.lq);
    worst.grad_ls = std::max(worst.grad_ls, b.grad_ls);
  }
  const bool finite = std::isfinite(worst.l1) && std::isfinite(worst.neg_inf) && std::isfinite(worst.lq) &&
                      std::isfinite(worst.grad_ls);
  VerificationReport r = VerificationReport::upper("theorem2_quantities", finite ? 0.0 : 1.0, 0.0, 0.0);
  r.quantities = {{"l1", worst.l1},   {"neg_inf", worst.neg_inf}, {"lq", worst.lq},
                  {"grad_ls", worst.grad_ls}, {"q", worst.q},   {"s", worst.s},
                  {"sources", static_cast<double>(greens.size())}};
  r.note = "finite per member; uniformity is asserted across the sweep";
  return r;
}

VerificationReport check_uniformity(const std::string& name, const std::vector<double>& values, double factor) {
  if (values.empty()) throw Error("uniformity: empty series");
  const double top = *std::max_element(values.begin(), values.end());
  const double med = median(values);
  const double ratio = med > 0.0 ? top / med : (top > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
  VerificationReport r = VerificationReport::upper("uniformity_" + name, ratio, factor, 0.0);
  for (std::size_t k = 0; k < values.size(); ++k) r.quantities.emplace_back("member_" + std::to_string(k), values[k]);
  r.quantities.emplace_back("max", top);
  r.quantities.emplace_back("median", med);
  r.note = "non-constructive constant replaced by max/median across the sweep";
  return r;
}

VerificationReport check_gradient_identity(const GreenField& green, const LaplacianOperator& op, double beta,
                                           double tol_disc) {
  if (!(beta > 0.0)) throw ConfigInvalid("gradient identity: beta must be positive");
  const ScalarField pos = green.positive();
  const ScalarField& mu = op.mass();
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    s += green.gradnorm[i] * green.gradnorm[i] * std::pow(pos[i], -1.0 - beta) * mu[i];
  VerificationReport r = VerificationReport::upper("gradient_identity", beta * s, 1.0, tol_disc);
  r.quantities = {{"beta", beta}, {"integral", s}, {"bound", 1.0 / beta}, {"source", static_cast<double>(green.source)}};
  return r;
}

double degiorgi_delta0(double p, int n) { return (p - n) / (n * p); }

DeGiorgiFit check_degiorgi(const ScalarField& v_in, const ScalarField& F, const BackgroundGeometry& background,
                           const MetricField& omega_t, double p) {
  const int n = v_in.grid().n();
  if (!(p > n)) throw ConfigInvalid("de giorgi: p must exceed n");
  DeGiorgiFit fit;
  fit.delta0 = degiorgi_delta0(p, n);
  const ScalarField mu_t = volume_weights(omega_t);
  ScalarField v = v_in;
  const double l1 = l1_norm(v, mu_t);
  const double V0 = background.volume_0();
  if (V0 > 0.0 && l1 > V0) {
    fit.rescale = V0 / l1;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] *= fit.rescale;
  }
  fit.sup_v = v.max();
  const double V = background.volume();

  fit.s_grid.push_back(0.0);
  if (fit.sup_v > 0.0) {
    // Geometric grid below sup v, ratio 2^{1/4}, about 40 octaves deep.
    std::vector<double> geo;
    for (int k = 0; k <= 160; ++k) geo.push_back(fit.sup_v * std::pow(2.0, -0.25 * k));
    std::reverse(geo.begin(), geo.end());
    fit.s_grid.insert(fit.s_grid.end(), geo.begin(), geo.end());
  }
  for (double s : fit.s_grid) fit.phi.push_back(levelset_mass(v, F, background, s).phi_s);

  double C6 = 0.0;
  for (std::size_t a = 0; a < fit.s_grid.size(); ++a) {
    if (fit.phi[a] <= 0.0) continue;
    const double denom = std::pow(fit.phi[a], 1.0 + fit.delta0);
    for (std::size_t b = a + 1; b < fit.s_grid.size(); ++b) {
      const double r = fit.s_grid[b] - fit.s_grid[a];
      if (r <= 0.0 || fit.phi[b] <= 0.0) continue;
      C6 = std::max(C6, r * fit.phi[b] / denom);
    }
  }
  if (!std::isfinite(C6)) throw RecursionViolated("de giorgi: no finite C6 fits the level-set data");
  fit.C6 = C6;
  fit.s0 = C6 > 0.0 ? std::pow(2.0 * C6, 1.0 / fit.delta0) * V : 0.0;
  fit.S_inf = fit.s0 + 1.0 / (1.0 - std::pow(2.0, -fit.delta0));
  if (!std::isfinite(fit.S_inf)) throw RecursionViolated("de giorgi: S_inf is not finite");
  fit.pass = fit.sup_v <= fit.S_inf;
  return fit;
}

DeGiorgiFit check_degiorgi_green(const GreenField& green, const LaplacianOperator& op,
                                 const BackgroundGeometry& background, double p) {
  ScalarField v = green.G;
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = -v[i];
  const ScalarField F = ma_determinant_ratio(op.metric(), background);
  return check_degiorgi(v, F, background, op.metric(), p);
}

VerificationReport to_report(const DeGiorgiFit& fit) {
  VerificationReport r = VerificationReport::upper("degiorgi", fit.sup_v, fit.S_inf, 0.0);
  r.quantities = {{"C6", fit.C6}, {"delta0", fit.delta0}, {"s0", fit.s0}, {"S_inf", fit.S_inf},
                  {"sup_v", fit.sup_v}, {"rescale", fit.rescale},
                  {"levels", static_cast<double>(fit.s_grid.size())}};
  return r;
}

VerificationReport check_sobolev_morrey(const std::vector<GreenField>& greens, const LaplacianOperator& op,
                                        const ScalarField& u, double p) {
  const int n = op.grid().n();
  if (!(p > 2.0 * n)) throw ConfigInvalid("sobolev-morrey: p must exceed 2n");
  const double pstar = p / (p - 1.0);
  const ScalarField& mu = op.mass();
  double C = 0.0;
  for (const GreenField& g : greens) {
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) s += std::pow(g.gradnorm[i], pstar) * mu[i];
    C = std::max(C, std::pow(s, 1.0 / pstar));
  }
  const ScalarField grad = metric_gradient_normsq(u, op.metric());
  double gp = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) gp += std::pow(grad[i], 0.5 * p) * mu[i];
  gp = std::pow(gp, 1.0 / p);
  const double avg = integrate(u, mu) / op.volume();
  double osc = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) osc = std::max(osc, std::abs(u[i] - avg));
  const double scale = std::max(osc, C * gp);
  VerificationReport r = VerificationReport::upper("sobolev_morrey", osc, C * gp, 1e-9 * scale);
  r.quantities = {{"p", p}, {"p_star", pstar}, {"witnessed_C", C}, {"grad_lp", gp}, {"sup_dev", osc}};
  r.note = "constant witnessed by Green gradients at the sampled sources";
  return r;
}

double chengli_floor(double A, double kappa, int n, double osc_phi) {
  return std::pow(A + kappa / n, -n) * std::exp(-A * osc_phi);
}

VerificationReport check_chengli_corollary(const MASolution& solution, const BackgroundGeometry& background,
                                           double A, double tolerance) {
  const int n = background.grid().n();
  const ScalarField F = ma_determinant_ratio(solution.metric, background);
  const ScalarField R = ricci_and_scalar(solution.metric).second;
  const double kappa = std::max(0.0, -R.min());
  const double osc = solution.phi.max() - solution.phi.min();
  const double floor = chengli_floor(A, kappa, n, osc);
  const double inf_eF = std::exp(F.min());
  VerificationReport r = VerificationReport::lower("chengli_floor", inf_eF, floor, tolerance);
  r.quantities = {{"kappa", kappa}, {"A", A}, {"osc_phi", osc}, {"inf_eF", inf_eF}, {"floor", floor},
                  {"sup_exp_neg_F_bound", std::pow(A + kappa / n, n)}};
  return r;
}

std::vector<VerificationReport> check_apriori_sweeps(const std::vector<SweepSample>& samples, double factor,
                                                     double drift) {
  if (samples.empty()) throw Error("a priori sweep: no samples");
  std::vector<double> budget, H, Q, S;
  for (const auto& s : samples) {
    budget.push_back(s.budget);
    H.push_back(s.sup_H);
    Q.push_back(s.sup_Q);
    S.push_back(s.sup_S);
  }
  const auto [lo, hi] = std::minmax_element(budget.begin(), budget.end());
  const double variation = *hi > 0.0 ? (*hi - *lo) / *hi : 0.0;
  if (variation > drift)
    throw BudgetDrift("a priori sweep: budget varies by " + std::to_string(100.0 * variation) + "%");
  std::vector<VerificationReport> out;
  VerificationReport b = VerificationReport::upper("budget_drift", variation, drift, 0.0);
  b.quantities = {{"min", *lo}, {"max", *hi}};
  out.push_back(b);
  out.push_back(check_uniformity("sup_H", H, factor));
  out.push_back(check_uniformity("sup_Q", Q, factor));
  out.push_back(check_uniformity("sup_S", S, factor));
  return out;
}

PowerFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw Error("power fit: need at least two points");
  const double k = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    syy += ly * ly;
  }
  PowerFit f;
  const double cxx = sxx - sx * sx / k, cxy = sxy - sx * sy / k, cyy = syy - sy * sy / k;
  f.slope = cxy / cxx;
  f.intercept = (sy - f.slope * sx) / k;
  f.r2 = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 1.0;
  return f;
}

double lq_exponent_bound(int n, int level) {
  if (n <= 1) return std::numeric_limits<double>::infinity();
  return 1.0 + 1.0 / (n - 1.0) - 1.0 / (std::pow(n, level + 1) * (n - 1.0));
}

}  // namespace kgl
