#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "kgl/functionals.hpp"
#include "kgl/ma_solver.hpp"

namespace kgl {

/// b(x) = exp(kappa * sum_a (cos 2 pi (x_a - c_a) - 1)), smooth and periodic,
/// with derivatives in closed form.
struct PeriodicBump {
  std::array<double, 4> centre{0.5, 0.5, 0.5, 0.5};
  double kappa = 1.0;

  double value(const GridSpec& grid, std::size_t i) const;
  /// Exact d^2 b / dz_i dz-bar_j at grid point i.
  Hermitian complex_hessian(const GridSpec& grid, std::size_t i) const;
  ScalarField sample(const GridSpec& grid) const;
};

/// Periodised |z - c|^2: sum over real axes of (sin(pi (x_a - c_a)) / pi)^2.
ScalarField periodic_radius_squared(const GridSpec& grid, const std::array<double, 4>& centre);

/// F built from the analytic Hessian of phi* = scale * bump, so the discrete
/// solve approximates phi* only up to discretisation error.
struct ManufacturedProblem {
  MAProblem problem;
  ScalarField phi_star;
};
ManufacturedProblem manufactured_problem(const BackgroundGeometry& background, const PeriodicBump& bump,
                                         double scale);

enum class FamilyKind { band_limited, radial_bump, near_singular };
/// peak: the Example 3.1 density a^n (a rho + delta) / (rho + delta)^{n - an + 1};
/// well: (rho + delta)^b, which drives sup e^{-F} up as delta shrinks.
enum class ProfileShape { peak, well };

std::string to_string(FamilyKind kind);
std::string to_string(ProfileShape shape);
FamilyKind family_kind_from_string(const std::string& s);
ProfileShape profile_shape_from_string(const std::string& s);

struct FamilySpec {
  FamilyKind kind = FamilyKind::band_limited;
  double amplitude = 0.3;
  std::uint64_t seed = 7;
  /// Band-limited: wave numbers with |k|_inf <= max_mode.
  int max_mode = 2;
  double bump_kappa = 2.0;
  std::vector<double> t_values{0.5};
  /// chi = diag(e_1, e_2) in the omega_X frame.
  std::vector<std::array<double, 2>> chi_eigenvalues{{0.5, 0.5}};
  ProfileShape shape = ProfileShape::peak;
  double a = 0.4;
  double well_exponent = 0.5;
  std::vector<double> deltas{1e-2};
  /// Profile centre; by default the cell centre next to (1/2, ..., 1/2).
  std::array<double, 4> centre{-1.0, -1.0, -1.0, -1.0};
  /// When positive (near_singular only), every member is rescaled so that
  /// ||grad F||_{L^p(e^F omega_X^n)} at this p equals its value at the first
  /// delta.
  double hold_budget_p = 0.0;
  ClassParams params;

  void validate() const;
};

struct FamilyMember {
  MAProblem problem;
  double t = 0.0;
  std::array<double, 2> chi{};
  /// Profile parameter (0 for the smooth generators).
  double delta = 0.0;
  /// Multiplier applied to the raw profile by budget holding (1 otherwise).
  double scale = 1.0;
  ClassMembership measured;
};

/// Cartesian product t x chi x delta (delta only for near_singular), in that
/// nesting order. Deterministic for a fixed seed.
std::vector<FamilyMember> generate_family(const GridSpec& grid, const FamilySpec& spec,
                                          const Hermitian& omega_x);

/// Factor s with ||grad (s F)||_{L^p} = target (both normalised).
/// Throws ConfigInvalid when no bracket is found.
double calibrate_scale(const ScalarField& raw, const BackgroundGeometry& background, double p, double target);

/// Raw (unnormalised) F of one family member.
ScalarField family_density(const GridSpec& grid, const FamilySpec& spec, double delta);

}  // namespace kgl
