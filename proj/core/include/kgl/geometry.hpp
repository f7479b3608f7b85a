#pragma once

// Discrete Kähler geometry on the flat torus.
//
// Conventions used throughout the library:
//   * volume form      omega^n = 2^n n! det(g) dx_1 dy_1 ... dx_n dy_n
//   * Laplacian        Delta_omega u = g^{j-bar i} d_i d_{j-bar} u  (trace of i ddbar u)
//   * gradient norm    |grad u|^2_omega = g^{j-bar i} d_i u d_{j-bar} u
// With these, int v Delta u omega^n = -int <grad u, grad v> omega^n with no
// stray factors of two. On the flat unit torus with omega_X = identity,
// |grad u|^2 is a quarter of the Euclidean |grad u|^2 in real coordinates.

#include <utility>

#include "kgl/grid.hpp"

namespace kgl {

/// (d^2 phi / dz_i dz-bar_j) by centred second differences in the real
/// coordinates. Hermitian at every point by construction.
MetricField i_del_delbar(const ScalarField& phi);

/// omega_hat + i ddbar phi for a constant form omega_hat.
MetricField metric_from_potential(const Hermitian& omega_hat, const ScalarField& phi);

/// F = log((omega^n / Vol(omega)) / (omega_X^n / V)), normalised against the
/// discrete total volume so that sum e^F mu_X = V holds to roundoff.
ScalarField ma_determinant_ratio(const MetricField& metric, const BackgroundGeometry& background);

/// Ric(omega) = -i ddbar log det g (Ric(omega_X) = 0 on the flat torus) and
/// the scalar curvature R = tr_omega Ric.
std::pair<MetricField, ScalarField> ricci_and_scalar(const MetricField& metric);

/// Cell masses mu = 2^n n! det(g) h^{2n}.
ScalarField volume_weights(const MetricField& metric);

/// sum f * mu in index order.
double integrate(const ScalarField& f, const MetricField& volume);
double integrate(const ScalarField& f, const ScalarField& weights);
double total_volume(const MetricField& metric);

/// Pointwise |grad u|^2_omega, paired with the stiffness form of
/// LaplacianOperator so that sum mu |grad u|^2 = u^T K u exactly.
ScalarField metric_gradient_normsq(const ScalarField& u, const MetricField& metric);

/// Pointwise polarisation <grad u, grad v>_omega of metric_gradient_normsq.
ScalarField metric_gradient_inner(const ScalarField& u, const ScalarField& v,
                                  const MetricField& metric);

/// Real symmetric 2n x 2n matrix A with |grad u|^2 = (du)^T A (du) in the
/// real axis order (x_1, y_1, ..., x_n, y_n). Entry (a, b) at a * 4 + b.
std::array<double, 16> real_gradient_form(const Hermitian& g);

}  // namespace kgl
