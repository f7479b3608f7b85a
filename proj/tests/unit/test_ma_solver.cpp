#include <gtest/gtest.h>

#include <cmath>

#include "kgl/errors.hpp"
#include "kgl/family.hpp"
#include "kgl/geometry.hpp"
#include "kgl/ma_solver.hpp"
#include "oracles.hpp"

using namespace kgl;
using oracle::pi;

namespace {

MAProblem band_limited_problem(const GridSpec& g, double amplitude, std::uint64_t seed, double t = 0.5) {
  FamilySpec spec;
  spec.amplitude = amplitude;
  spec.seed = seed;
  const BackgroundGeometry bg(g, Hermitian::identity(g.n()), Hermitian::scalar(g.n(), 0.5), t);
  return {bg, normalize_density(family_density(g, spec, 0.0), bg)};
}

}  // namespace

TEST(SolveMA, ZeroDensityGivesZeroPotential) {
  for (int n : {1, 2}) {
    const GridSpec g(n, 8);
    const auto bg = BackgroundGeometry::fixed_class(g);
    const MAProblem p{bg, ScalarField(g)};
    const MASolution s = solve_ma(p, 1e-10, 10);
    for (double v : s.phi.values()) EXPECT_EQ(v, 0.0);
    EXPECT_LE(s.residual, 1e-12);
    if (n == 2) EXPECT_EQ(s.iterations, 0);
  }
}

TEST(SolveMA, OneDimMatchesDirectPoissonOracle) {
  const GridSpec g(1, 16);
  const MAProblem p = band_limited_problem(g, 0.3, 4);
  const ScalarField want = oracle::poisson_n1(p);
  const MASolution direct = solve_ma(p, 1e-11, 50);
  SolverSettings newton;
  newton.force_newton = true;
  newton.cg_tol = 1e-12;
  const MASolution iterated = solve_ma(p, 1e-11, 50, newton);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(direct.phi[i], want[i], 1e-10);
    EXPECT_NEAR(iterated.phi[i], want[i], 1e-9);
  }
  EXPECT_EQ(direct.phi.max(), 0.0);
  EXPECT_GT(iterated.iterations, 0);
}

TEST(SolveMA, InvariantUnderAdditiveConstantsInF) {
  const GridSpec g(2, 8);
  const MAProblem p = band_limited_problem(g, 0.2, 2);
  ScalarField shifted = p.F;
  for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] += 0.7;
  const MAProblem q{p.background, normalize_density(shifted, p.background)};
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(q.F[i], p.F[i], 1e-13);
  const MASolution a = solve_ma(p, 1e-10, 40), b = solve_ma(q, 1e-10, 40);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.phi[i], b.phi[i], 1e-9);
}

TEST(SolveMA, NewtonResidualIsMonotoneAndConverges) {
  const GridSpec g(2, 8);
  const MAProblem p = band_limited_problem(g, 0.3, 6, 0.3);
  const MASolution s = solve_ma(p, 1e-9, 60);
  ASSERT_GE(s.residual_history.size(), 2u);
  for (std::size_t k = 1; k < s.residual_history.size(); ++k)
    EXPECT_LE(s.residual_history[k], s.residual_history[k - 1]);
  EXPECT_LE(s.residual_history.back(), 1e-9);
  EXPECT_EQ(s.newton_damping_history.size(), static_cast<std::size_t>(s.iterations));
  EXPECT_EQ(s.phi.max(), 0.0);
  EXPECT_LE(ScalarField(ma_residual(s.metric, p)).max() - ScalarField(ma_residual(s.metric, p)).min(), 2e-9);
}

TEST(SolveMA, VolumeIsConserved) {
  // Exact for n = 1 (the discrete ddbar sums to zero); O(h^2) for n = 2.
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const MAProblem p = band_limited_problem(g, 0.3, 8, 0.4);
    const MASolution s = solve_ma(p, 1e-10, 60);
    const double tol = n == 1 ? 1e-12 : 1e-3;
    EXPECT_NEAR(total_volume(s.metric), p.background.volume_t(), tol * p.background.volume_t());
  }
}

TEST(SolveMA, CachedPotentialReproducesSolution) {
  const GridSpec g(2, 8);
  const MAProblem p = band_limited_problem(g, 0.3, 3);
  const MASolution s = solve_ma(p, 1e-10, 60);
  const MASolution r = solution_from_potential(p, s.phi);
  EXPECT_EQ(r.residual, s.residual);
  EXPECT_EQ(r.normalizer, s.normalizer);
  for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(r.phi[i], s.phi[i]);
}

TEST(SolveMA, ManufacturedSolutionConverges) {
  double errs[2];
  const int ms[2] = {8, 16};
  for (int k = 0; k < 2; ++k) {
    const GridSpec g(1, ms[k] * 4);
    const auto bg = BackgroundGeometry::fixed_class(g);
    const auto mp = manufactured_problem(bg, PeriodicBump{{0.5, 0.5, 0, 0}, 1.0}, 0.05);
    const MASolution s = solve_ma(mp.problem, 1e-12, 50);
    ScalarField star = mp.phi_star;
    const double top = star.max();
    double e = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) e = std::max(e, std::abs(s.phi[i] - (star[i] - top)));
    errs[k] = e;
  }
  EXPECT_GE(oracle::observed_order(errs[0], errs[1]), 1.8);
}

TEST(SolveMA, ReportsNonConvergence) {
  const GridSpec g(2, 8);
  const MAProblem p = band_limited_problem(g, 0.3, 6, 0.3);
  try {
    solve_ma(p, 1e-14, 1);
    FAIL() << "expected NotConverged";
  } catch (const NotConverged& e) {
    EXPECT_EQ(e.iterations(), 1);
    EXPECT_GT(e.residual(), 1e-14);
  }
}

TEST(SolveMA, RejectsGuessOutsideKahlerCone) {
  const GridSpec g(2, 8);
  const MAProblem p = band_limited_problem(g, 0.3, 6);
  ScalarField guess = PeriodicBump{{0.5, 0.5, 0.5, 0.5}, 1.0}.sample(g);
  for (std::size_t i = 0; i < guess.size(); ++i) guess[i] *= 5.0;
  SolverSettings s;
  s.initial_guess = guess;
  EXPECT_THROW(solve_ma(p, 1e-8, 20, s), LeftKahlerCone);
}

TEST(SolveMA, ValidatesProblem) {
  const GridSpec g(1, 16);
  const auto bg = BackgroundGeometry::fixed_class(g);
  EXPECT_THROW(solve_ma({bg, ScalarField(g, 0.1)}, 1e-8, 10), ConfigInvalid);
  ScalarField bad(g);
  bad[3] = std::nan("");
  EXPECT_THROW(solve_ma({bg, bad}, 1e-8, 10), ConfigInvalid);
  EXPECT_THROW(solve_ma({bg, ScalarField(GridSpec(1, 8))}, 1e-8, 10), ConfigInvalid);
  EXPECT_THROW(solve_ma({bg, ScalarField(g)}, 0.0, 10), ConfigInvalid);
}

TEST(Family, NormalisedDeterministicAndOrdered) {
  const GridSpec g(1, 32);
  FamilySpec spec;
  spec.t_values = {1.0, 0.3};
  spec.chi_eigenvalues = {{0.0, 0.0}, {0.5, 0.5}};
  const auto a = generate_family(g, spec, Hermitian::identity(1));
  const auto b = generate_family(g, spec, Hermitian::identity(1));
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0].t, 1.0);
  EXPECT_EQ(a[1].chi[0], 0.5);
  EXPECT_EQ(a[2].t, 0.3);
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_NO_THROW(a[k].problem.validate());
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(a[k].problem.F[i], b[k].problem.F[i]);
  }
  spec.seed = 8;
  const auto c = generate_family(g, spec, Hermitian::identity(1));
  EXPECT_NE(c[0].problem.F[5], a[0].problem.F[5]);
}

TEST(Family, BumpAndNearSingularShapes) {
  const GridSpec g(1, 32);
  FamilySpec spec;
  spec.kind = FamilyKind::radial_bump;
  spec.amplitude = 1.0;
  const ScalarField bump = family_density(g, spec, 0.0);
  EXPECT_LE(bump.max(), 1.0);
  EXPECT_GT(bump.max(), 0.95);

  spec.kind = FamilyKind::near_singular;
  spec.a = 1.0;
  const ScalarField flat = family_density(g, spec, 1e-3);
  EXPECT_LE(flat.max() - flat.min(), 1e-12);

  spec.a = 0.4;
  spec.deltas = {1e-1, 1e-2, 1e-3};
  const auto members = generate_family(g, spec, Hermitian::identity(1));
  ASSERT_EQ(members.size(), 3u);
  for (std::size_t k = 1; k < members.size(); ++k)
    EXPECT_GT(members[k].problem.F.max() - members[k].problem.F.min(),
              members[k - 1].problem.F.max() - members[k - 1].problem.F.min());
}

TEST(Family, HoldBudgetCalibratesEveryMember) {
  const GridSpec g(1, 32);
  FamilySpec spec;
  spec.kind = FamilyKind::near_singular;
  spec.amplitude = 1.0;
  spec.deltas = {1e-1, 1e-2, 1e-3};
  spec.hold_budget_p = 2.0;
  const auto members = generate_family(g, spec, Hermitian::identity(1));
  const double target = gradient_lp_norm(members[0].problem.F, members[0].problem.background, 2.0);
  EXPECT_EQ(members[0].scale, 1.0);
  for (const auto& m : members) {
    EXPECT_NEAR(gradient_lp_norm(m.problem.F, m.problem.background, 2.0), target, 1e-8 * target);
    EXPECT_LE(m.scale, 1.0);
  }
  spec.kind = FamilyKind::band_limited;
  EXPECT_THROW(spec.validate(), ConfigInvalid);
}

TEST(Family, RejectsInvalidSpecs) {
  FamilySpec spec;
  spec.t_values = {0.0};
  EXPECT_THROW(spec.validate(), ConfigInvalid);
  spec = {};
  spec.amplitude = -1;
  EXPECT_THROW(spec.validate(), ConfigInvalid);
  spec = {};
  spec.kind = FamilyKind::near_singular;
  spec.deltas = {};
  EXPECT_THROW(spec.validate(), ConfigInvalid);
  EXPECT_THROW(family_kind_from_string("gaussian"), ConfigInvalid);
  EXPECT_EQ(family_kind_from_string(to_string(FamilyKind::radial_bump)), FamilyKind::radial_bump);
}
