#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "kgl/family.hpp"

namespace kgl {

struct SolverTolerances {
  double ma_tol = 1e-8;
  int ma_max_iter = 80;
  double cg_tol = 1e-4;
  double green_tol = 1e-10;
  int green_max_iter = 5000;
};

struct ExampleBlock {
  double a = 0.4;
  int n = 2;
  double p = 1.5;
};

struct RunConfig {
  int n = 1;
  int m = 64;
  FamilySpec family;
  /// Exponent slack in the uniform Green bounds.
  double class_delta = 0.1;
  SolverTolerances solver;
  /// Random Green sources per sweep member (argmax F and argmin F are added).
  int sources = 6;
  std::vector<double> betas{0.5, 1.0};
  double gradient_identity_tol = 0.05;
  /// Exponent of the level-set recursion and of the Sobolev-Morrey check (> 2n).
  double degiorgi_p = 4.0;
  double sobolev_p = 6.0;
  double uniformity_factor = 3.0;
  double budget_drift = 0.1;
  double lambda = 1.0;
  double mu = 1.0;
  std::vector<ExampleBlock> examples{{0.4, 2, 1.5}, {0.9, 2, 3.0}};
  std::vector<double> example_deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::string out = "kgl-out";
  std::uint64_t seed = 7;
  int workers = 1;

  /// Throws ConfigInvalid with a single diagnostic.
  void validate() const;
};

/// Unknown keys and wrong types are rejected; missing keys keep defaults.
RunConfig parse_config(std::string_view json_text);
/// Every field, defaults included; parse_config(dump_config(c)) == c.
std::string dump_config(const RunConfig& config);

/// Stable 64-bit digest of the numerical part of the config (out and
/// workers excluded).
std::uint64_t config_hash(const RunConfig& config);

}  // namespace kgl
