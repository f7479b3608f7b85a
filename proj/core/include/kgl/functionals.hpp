#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kgl/grid.hpp"
#include "kgl/ma_solver.hpp"

namespace kgl {

struct ClassParams {
  double p = 2.0;
  double N = 2.0;
  double epsilon = 0.5;
  double gamma = 1.5;

  /// Throws ConfigInvalid unless N, epsilon, gamma > 0 and p >= 1.
  void validate() const;
};

/// Ent_p against omega_t^n and against e^F omega_X^n.
struct EntropyForms {
  double against_metric = 0.0;
  double against_density = 0.0;
};

EntropyForms entropy_p_forms(const ScalarField& F, const MetricField& omega_t,
                             const BackgroundGeometry& background, double p);
/// (1/V) sum |F|^p e^F mu_X; only needs F.
double entropy_p(const ScalarField& F, const BackgroundGeometry& background, double p);

struct ClassMembership {
  double exp_moment = 0.0;         // (1/V) int e^{(1+eps)F} omega_X^n
  double sup_exp_neg_F = 0.0;      // sup e^{-F}
  double laplacian_budget = 0.0;   // int (e^{-F} + |Delta_X e^{-F}|) omega_X^n
  double gradient_budget = 0.0;    // int (e^{-F} + |grad e^{-F}|^2_X) omega_X^n
  double entropy = 0.0;            // Ent_p
  bool fixed_class = false;
  bool m_prime = false;
  bool m_double_prime = false;
  /// Only defined on the fixed class; false elsewhere.
  bool m_tilde = false;
  bool m_entropy = false;
};

ClassMembership class_membership(const ScalarField& F, const BackgroundGeometry& background,
                                 const ClassParams& params);

/// (int |grad F|^p_X e^F omega_X^n)^{1/p}.
double gradient_lp_norm(const ScalarField& F, const BackgroundGeometry& background, double p);
/// (int |i ddbar F|^p_X e^F omega_X^n)^{1/p} with the Frobenius norm under omega_X.
double hessian_lp_norm(const ScalarField& F, const BackgroundGeometry& background, double p);

struct FieldSummary {
  ScalarField field;
  double sup = 0.0;
  /// int field omega_X^n.
  double integral_x = 0.0;
  /// int field^{eps/(1+eps)} omega_t^n.
  double integral_eps = 0.0;
};

/// H = e^{-lambda phi} |grad phi|^2_X.
FieldSummary gradient_quantity_H(const ScalarField& phi, const MetricField& omega_t,
                                 const BackgroundGeometry& background, double lambda, double epsilon);
/// Q = e^{-mu phi} tr_X omega_t.
FieldSummary c2_quantity_Q(const ScalarField& phi, const MetricField& omega_t,
                           const BackgroundGeometry& background, double mu, double epsilon);
/// |S|^2_g with S the Christoffel symbols of g (the background is flat).
ScalarField c3_tensor_normsq(const MetricField& metric);

struct LevelSetMass {
  double phi_s = 0.0;  // int_{v > s} e^F omega_X^n
  double A_s = 0.0;    // (1/V) int_{v > s} (v - s) e^F omega_X^n
};

LevelSetMass levelset_mass(const ScalarField& v, const ScalarField& F,
                           const BackgroundGeometry& background, double s);

/// Flat record of every functional; serialised key by key.
struct FunctionalReport {
  double entropy_p = 0.0;
  double entropy_p_density_form = 0.0;
  double exp_moment = 0.0;
  double sup_exp_neg_F = 0.0;
  double laplacian_budget = 0.0;
  double gradient_budget = 0.0;
  double grad_F_lp = 0.0;
  double hess_F_lp = 0.0;
  double sup_H = 0.0;
  double sup_Q = 0.0;
  double sup_S = 0.0;
  ClassMembership membership;

  std::vector<std::pair<std::string, double>> entries() const;
};

FunctionalReport functional_report(const MAProblem& problem, const MASolution& solution,
                                   const ClassParams& params, double lambda = 1.0, double mu = 1.0);

}  // namespace kgl
