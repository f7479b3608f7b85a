#include "kgl/functionals.hpp"

#include <cmath>

#include "kgl/errors.hpp"
#include "kgl/geometry.hpp"
#include "kgl/laplacian.hpp"

namespace kgl {
namespace {

// Small dense complex matrix, row-major, n <= 2.
struct CMat {
  int n = 1;
  std::array<Complex, 4> a{};
  Complex& operator()(int i, int j) { return a[i * 2 + j]; }
  Complex operator()(int i, int j) const { return a[i * 2 + j]; }
};

CMat to_mat(const Hermitian& h) {
  CMat m;
  m.n = h.n();
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) m(i, j) = h(i, j);
  return m;
}

CMat mul(const CMat& x, const CMat& y) {
  CMat r;
  r.n = x.n;
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      Complex s = 0.0;
      for (int k = 0; k < x.n; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  return r;
}

double mu_x(const BackgroundGeometry& bg) {
  return volume_density(bg.omega_x()) * bg.grid().cell_volume();
}

bool is_fixed_class(const BackgroundGeometry& bg) {
  const Hermitian diff = bg.omega_hat() - bg.omega_x();
  const double scale = bg.omega_x().max_eigenvalue();
  return std::abs(diff.diag(0)) + std::abs(diff.diag(1)) + std::abs(diff.off()) <= 1e-12 * scale;
}

}  // namespace

void ClassParams::validate() const {
  if (!(p >= 1.0)) throw ConfigInvalid("class params: p must be at least 1");
  if (!(N > 0.0)) throw ConfigInvalid("class params: N must be positive");
  if (!(epsilon > 0.0)) throw ConfigInvalid("class params: epsilon must be positive");
  if (!(gamma > 0.0)) throw ConfigInvalid("class params: gamma must be positive");
}

EntropyForms entropy_p_forms(const ScalarField& F, const MetricField& omega_t,
                             const BackgroundGeometry& background, double p) {
  EntropyForms out;
  const ScalarField mu_t = volume_weights(omega_t);
  double vt = 0.0, s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    vt += mu_t[i];
    s += std::pow(std::abs(F[i]), p) * mu_t[i];
  }
  out.against_metric = s / vt;
  out.against_density = entropy_p(F, background, p);
  return out;
}

double entropy_p(const ScalarField& F, const BackgroundGeometry& background, double p) {
  const double w = mu_x(background);
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) s += std::pow(std::abs(F[i]), p) * std::exp(F[i]) * w;
  return s / background.volume();
}

ClassMembership class_membership(const ScalarField& F, const BackgroundGeometry& background,
                                 const ClassParams& params) {
  params.validate();
  ClassMembership c;
  const GridSpec& g = F.grid();
  const double w = mu_x(background);
  ScalarField e_neg(g);
  double moment = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    moment += std::exp((1.0 + params.epsilon) * F[i]) * w;
    e_neg[i] = std::exp(-F[i]);
  }
  c.exp_moment = moment / background.volume();
  c.sup_exp_neg_F = e_neg.max();

  const MetricField omega_x = background.omega_x_field();
  const LaplacianOperator op(omega_x, Preconditioner::none);
  const ScalarField lap = op.laplacian(e_neg);
  const ScalarField grad = metric_gradient_normsq(e_neg, omega_x);
  double lb = 0.0, gb = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    lb += (e_neg[i] + std::abs(lap[i])) * w;
    gb += (e_neg[i] + grad[i]) * w;
  }
  c.laplacian_budget = lb;
  c.gradient_budget = gb;
  c.entropy = entropy_p(F, background, params.p);
  c.fixed_class = is_fixed_class(background);

  const bool moment_ok = c.exp_moment <= params.N;
  c.m_prime = moment_ok && c.sup_exp_neg_F <= params.gamma;
  c.m_double_prime = moment_ok && c.laplacian_budget <= params.gamma;
  c.m_tilde = c.fixed_class && moment_ok && c.gradient_budget <= params.gamma;
  c.m_entropy = c.entropy <= params.N;
  return c;
}

double gradient_lp_norm(const ScalarField& F, const BackgroundGeometry& background, double p) {
  const ScalarField grad = metric_gradient_normsq(F, background.omega_x_field());
  const double w = mu_x(background);
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) s += std::pow(grad[i], 0.5 * p) * std::exp(F[i]) * w;
  return std::pow(s, 1.0 / p);
}

double hessian_lp_norm(const ScalarField& F, const BackgroundGeometry& background, double p) {
  const MetricField hess = i_del_delbar(F);
  const CMat xinv = to_mat(background.omega_x().inverse());
  const double w = mu_x(background);
  double s = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const CMat a = mul(xinv, to_mat(hess.at(i)));
    const CMat aa = mul(a, a);
    double tr = 0.0;
    for (int k = 0; k < aa.n; ++k) tr += aa(k, k).real();
    s += std::pow(std::max(tr, 0.0), 0.5 * p) * std::exp(F[i]) * w;
  }
  return std::pow(s, 1.0 / p);
}

namespace {

FieldSummary summarise(ScalarField field, const MetricField& omega_t, const BackgroundGeometry& background,
                       double epsilon) {
  FieldSummary out{std::move(field), 0.0, 0.0, 0.0};
  out.sup = out.field.max();
  const double w = mu_x(background);
  const ScalarField mu_t = volume_weights(omega_t);
  const double e = epsilon / (1.0 + epsilon);
  for (std::size_t i = 0; i < out.field.size(); ++i) {
    out.integral_x += out.field[i] * w;
    out.integral_eps += std::pow(std::max(out.field[i], 0.0), e) * mu_t[i];
  }
  return out;
}

}  // namespace

FieldSummary gradient_quantity_H(const ScalarField& phi, const MetricField& omega_t,
                                 const BackgroundGeometry& background, double lambda, double epsilon) {
  if (!(lambda >= 0.0)) throw ConfigInvalid("H: lambda must be nonnegative");
  ScalarField H = metric_gradient_normsq(phi, background.omega_x_field());
  for (std::size_t i = 0; i < H.size(); ++i) H[i] *= std::exp(-lambda * phi[i]);
  return summarise(std::move(H), omega_t, background, epsilon);
}

FieldSummary c2_quantity_Q(const ScalarField& phi, const MetricField& omega_t,
                           const BackgroundGeometry& background, double mu, double epsilon) {
  if (!(mu >= 0.0)) throw ConfigInvalid("Q: mu must be nonnegative");
  omega_t.require_positive();
  ScalarField Q(phi.grid());
  for (std::size_t i = 0; i < Q.size(); ++i)
    Q[i] = std::exp(-mu * phi[i]) * background.omega_x().trace_against(omega_t.at(i));
  return summarise(std::move(Q), omega_t, background, epsilon);
}

ScalarField c3_tensor_normsq(const MetricField& metric) {
  metric.require_positive();
  const GridSpec& g = metric.grid();
  const int n = g.n();
  const double h = g.h();
  ScalarField out(g);
  for (std::size_t x = 0; x < g.size(); ++x) {
    const CMat G = to_mat(metric.at(x));
    const CMat Ginv = to_mat(metric.at(x).inverse());
    // dG[j] = d_j G = 1/2 (d_x_j - i d_y_j) G by centred differences.
    std::array<CMat, 2> dG{};
    for (int j = 0; j < n; ++j) {
      const CMat px = to_mat(metric.at(g.shift(x, 2 * j, 1)));
      const CMat mx = to_mat(metric.at(g.shift(x, 2 * j, -1)));
      const CMat py = to_mat(metric.at(g.shift(x, 2 * j + 1, 1)));
      const CMat my = to_mat(metric.at(g.shift(x, 2 * j + 1, -1)));
      dG[j].n = n;
      for (int k = 0; k < 4; ++k) {
        const Complex dx = (px.a[k] - mx.a[k]) / (2.0 * h);
        const Complex dy = (py.a[k] - my.a[k]) / (2.0 * h);
        dG[j].a[k] = 0.5 * (dx - Complex(0.0, 1.0) * dy);
      }
    }
    // Gamma^i_{jk} = sum_l Ginv(l, i) d_j G(k, l); H = G^{-T} raises the lower indices.
    Complex S[2][2][2];
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
          Complex s = 0.0;
          for (int l = 0; l < n; ++l) s += Ginv(l, i) * dG[j](k, l);
          S[i][j][k] = s;
        }
    double total = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l)
            for (int p = 0; p < n; ++p)
              for (int q = 0; q < n; ++q)
                total += (S[i][j][k] * std::conj(S[l][p][q]) * G(i, l) * Ginv(p, j) * Ginv(q, k)).real();
    out[x] = std::max(total, 0.0);
  }
  return out;
}

LevelSetMass levelset_mass(const ScalarField& v, const ScalarField& F, const BackgroundGeometry& background,
                           double s) {
  const double w = mu_x(background);
  LevelSetMass out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] > s) {
      const double m = std::exp(F[i]) * w;
      out.phi_s += m;
      out.A_s += (v[i] - s) * m;
    }
  }
  out.A_s /= background.volume();
  return out;
}

std::vector<std::pair<std::string, double>> FunctionalReport::entries() const {
  return {
      {"entropy_p", entropy_p},
      {"entropy_p_density_form", entropy_p_density_form},
      {"exp_moment", exp_moment},
      {"sup_exp_neg_F", sup_exp_neg_F},
      {"laplacian_budget", laplacian_budget},
      {"gradient_budget", gradient_budget},
      {"grad_F_lp", grad_F_lp},
      {"hess_F_lp", hess_F_lp},
      {"sup_H", sup_H},
      {"sup_Q", sup_Q},
      {"sup_S", sup_S},
      {"class_m_prime", membership.m_prime ? 1.0 : 0.0},
      {"class_m_double_prime", membership.m_double_prime ? 1.0 : 0.0},
      {"class_m_tilde", membership.m_tilde ? 1.0 : 0.0},
      {"class_m_entropy", membership.m_entropy ? 1.0 : 0.0},
  };
}

FunctionalReport functional_report(const MAProblem& problem, const MASolution& solution,
                                   const ClassParams& params, double lambda, double mu) {
  FunctionalReport r;
  const auto& bg = problem.background;
  const EntropyForms ent = entropy_p_forms(problem.F, solution.metric, bg, params.p);
  r.entropy_p = ent.against_metric;
  r.entropy_p_density_form = ent.against_density;
  r.membership = class_membership(problem.F, bg, params);
  r.exp_moment = r.membership.exp_moment;
  r.sup_exp_neg_F = r.membership.sup_exp_neg_F;
  r.laplacian_budget = r.membership.laplacian_budget;
  r.gradient_budget = r.membership.gradient_budget;
  r.grad_F_lp = gradient_lp_norm(problem.F, bg, params.p);
  r.hess_F_lp = hessian_lp_norm(problem.F, bg, params.p);
  r.sup_H = gradient_quantity_H(solution.phi, solution.metric, bg, lambda, params.epsilon).sup;
  r.sup_Q = c2_quantity_Q(solution.phi, solution.metric, bg, mu, params.epsilon).sup;
  r.sup_S = c3_tensor_normsq(solution.metric).max();
  return r;
}

}  // namespace kgl
