#pragma once

#include <cstdint>
#include <vector>

#include "kgl/laplacian.hpp"

namespace kgl {

/// Normalised Green's function G(x, .) of one source x.
struct GreenField {
  std::size_t source = 0;
  ScalarField G;
  /// -min G.
  double C_l = 0.0;
  /// |grad G|_omega per point.
  ScalarField gradnorm;
  int iterations = 0;
  double residual = 0.0;

  /// G + C_l + 1 (>= 1 everywhere).
  ScalarField positive() const;
};

/// Solves K G = e_x - mu / V_t and shifts G to zero mu-mean.
/// Throws NotConverged when the PCG tolerance is not met.
GreenField solve_green(const LaplacianOperator& op, std::size_t x, double tol, int max_iter = 5000);

/// C_l and |grad G| for an already normalised G (e.g. one read from disk).
GreenField green_from_values(const LaplacianOperator& op, std::size_t x, ScalarField G);

/// Solve several sources; results come back in source order.
std::vector<GreenField> solve_greens(const LaplacianOperator& op, const std::vector<std::size_t>& sources,
                                     double tol, int workers = 1, int max_iter = 5000);

/// max over sources of |u(x) - avg_mu u - sum mu <grad G, grad u>|.
double representation_check(const LaplacianOperator& op, const std::vector<GreenField>& greens,
                            const ScalarField& u);

/// `random_count` seeded pseudo-random nodes followed by argmax F and
/// argmin F, duplicates dropped, order deterministic.
std::vector<std::size_t> sample_sources(const ScalarField& F, int random_count, std::uint64_t seed);

}  // namespace kgl
