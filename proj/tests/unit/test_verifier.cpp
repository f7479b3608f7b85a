#include <gtest/gtest.h>

#include <cmath>

#include "kgl/errors.hpp"
#include "kgl/family.hpp"
#include "kgl/geometry.hpp"
#include "kgl/green.hpp"
#include "kgl/verifier.hpp"
#include "oracles.hpp"

using namespace kgl;

namespace {

MetricField bumpy_metric(const GridSpec& g, double base = 1.0) {
  FamilySpec spec;
  spec.seed = 13;
  spec.amplitude = 0.004;
  return metric_from_potential(Hermitian::scalar(g.n(), base), family_density(g, spec, 0.0));
}

}  // namespace

TEST(Theorem1, LowerChainHoldsForMeanZeroGreen) {
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const LaplacianOperator op(bumpy_metric(g));
    for (std::size_t x : {std::size_t{0}, g.size() / 3}) {
      const auto r = check_theorem1(solve_green(op, x, 1e-11), op);
      EXPECT_TRUE(r.pass);
      EXPECT_GT(r.margin, 0.0);
      EXPECT_NEAR(r.quantity("ratio"), r.quantity("neg_inf") / (1 + r.quantity("l1")), 1e-15);
    }
  }
}

TEST(Theorem1, DetectsAViolation) {
  // A field with tiny negative part but large L1 mass cannot be mean zero.
  const GridSpec g(1, 16);
  const LaplacianOperator op(MetricField(g, Hermitian::identity(1)));
  ScalarField G(g, 1.0);
  G[0] = -1e-3;
  const auto r = check_theorem1(green_from_values(op, 0, G), op);
  EXPECT_FALSE(r.pass);
  EXPECT_LT(r.margin, 0.0);
}

TEST(Theorem2, ExponentsAndClassGuard) {
  EXPECT_EQ(theorem2_q(1, 0.1), 3.0);
  EXPECT_NEAR(theorem2_q(2, 0.1), 1.9, 1e-15);
  EXPECT_NEAR(theorem2_s(2, 0.1), 4.0 / 3.0 - 0.1, 1e-15);
  EXPECT_NEAR(theorem2_s(1, 0.0), 2.0, 1e-15);

  const GridSpec g(1, 16);
  const LaplacianOperator op(MetricField(g, Hermitian::identity(1)));
  const std::vector<GreenField> greens{solve_green(op, 5, 1e-11)};
  EXPECT_THROW(check_theorem2(greens, op, false, 0.1), ClassViolation);
  const auto r = check_theorem2(greens, op, true, 0.1);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.quantity("q"), 3.0);
  EXPECT_GT(r.quantity("lq"), 0.0);
}

TEST(Theorem2, ZeroDensityQuantitiesFollowTheScalingLaw) {
  // F = 0 with omega_t = c omega_X: G scales like c^{1-n}, the L1 norm like c.
  const GridSpec g(2, 8);
  std::vector<double> l1, neg_inf;
  const std::vector<double> ts{1.0, 0.5, 0.1};
  for (double t : ts) {
    const BackgroundGeometry bg(g, Hermitian::identity(2), Hermitian::scalar(2, 0.5), t);
    const LaplacianOperator op(bg.omega_hat_field());
    const auto b = green_bounds(solve_green(op, 3, 1e-12), op, 0.1);
    l1.push_back(b.l1);
    neg_inf.push_back(b.neg_inf);
  }
  for (std::size_t k = 1; k < ts.size(); ++k) {
    const double c = (0.5 + ts[k]) / (0.5 + ts[0]);
    EXPECT_NEAR(neg_inf[k], neg_inf[0] / c, 1e-8 * neg_inf[0]);
    EXPECT_NEAR(l1[k], l1[0] * c, 1e-8 * l1[0]);
  }
  EXPECT_TRUE(check_uniformity("l1", l1).pass);
  EXPECT_TRUE(check_uniformity("neg_inf", neg_inf).pass);
}

TEST(Uniformity, RatioOfMaxToMedian) {
  const auto r = check_uniformity("x", {1.0, 3.0, 2.0});
  EXPECT_NEAR(r.value, 1.5, 1e-15);
  EXPECT_TRUE(r.pass);
  EXPECT_EQ(r.quantity("median"), 2.0);
  EXPECT_FALSE(check_uniformity("x", {1.0, 1.0, 10.0}).pass);
  EXPECT_TRUE(check_uniformity("x", {0.0, 0.0}).pass);
  EXPECT_THROW(check_uniformity("x", {}), Error);
}

TEST(GradientIdentity, MatchesDiscreteEnergyOracle) {
  // Summation by parts: beta int |grad G|^2 Gpos^{-1-beta} equals
  // avg(Gpos^{-beta}) - Gpos(x)^{-beta} up to the chain rule error.
  const GridSpec g(1, 64);
  const LaplacianOperator op(MetricField(g, Hermitian::identity(1)));
  const GreenField gf = solve_green(op, 100, 1e-12);
  const ScalarField pos = gf.positive();
  for (double beta : {0.5, 1.0}) {
    double avg = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) avg += std::pow(pos[i], -beta) * op.mass()[i];
    avg /= op.volume();
    const double oracle_value = avg - std::pow(pos[gf.source], -beta);
    const auto r = check_gradient_identity(gf, op, beta);
    EXPECT_NEAR(r.value, oracle_value, 0.1 * oracle_value);
    EXPECT_LT(oracle_value, 1.0);
    EXPECT_TRUE(r.pass);
  }
  EXPECT_THROW(check_gradient_identity(gf, op, 0.0), ConfigInvalid);
}

TEST(DeGiorgi, RecursionBoundsGreenSup) {
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const BackgroundGeometry bg(g, Hermitian::identity(n), Hermitian::scalar(n, 0.5), 0.5);
    const LaplacianOperator op(bumpy_metric(g));
    const auto fit = check_degiorgi_green(solve_green(op, 9, 1e-11), op, bg, 4.0);
    EXPECT_TRUE(fit.pass);
    EXPECT_NEAR(fit.delta0, degiorgi_delta0(4.0, n), 0.0);
    EXPECT_GT(fit.C6, 0.0);
    EXPECT_GE(fit.S_inf, fit.sup_v);
    const auto r = to_report(fit);
    EXPECT_EQ(r.check, "degiorgi");
    EXPECT_TRUE(r.pass);
  }
  EXPECT_NEAR(degiorgi_delta0(4.0, 2), 0.25, 1e-15);
}

TEST(DeGiorgi, RescalesAndRejectsBadExponent) {
  const GridSpec g(1, 16);
  const auto bg = BackgroundGeometry::fixed_class(g);
  ScalarField v(g, -1.0);
  const auto flat = check_degiorgi(v, ScalarField(g), bg, bg.omega_hat_field(), 3.0);
  EXPECT_LE(flat.sup_v, 0.0);
  EXPECT_TRUE(flat.pass);
  ScalarField big(g, 0.0);
  big[7] = 1e6;
  const auto fit = check_degiorgi(big, ScalarField(g), bg, bg.omega_hat_field(), 3.0);
  EXPECT_LT(fit.rescale, 1.0);
  EXPECT_THROW(check_degiorgi(v, ScalarField(g), bg, bg.omega_hat_field(), 1.0), ConfigInvalid);
}

TEST(SobolevMorrey, HolderBoundWitnessedAtExtremes) {
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const LaplacianOperator op(bumpy_metric(g));
    FamilySpec spec;
    spec.seed = 77;
    const ScalarField u = family_density(g, spec, 0.0);
    const auto greens = solve_greens(op, {u.argmax(), u.argmin()}, 1e-12);
    const auto r = check_sobolev_morrey(greens, op, u, 6.0);
    EXPECT_TRUE(r.pass) << r.value << " vs " << r.bound;
    EXPECT_NEAR(r.quantity("p_star"), 1.2, 1e-15);
    EXPECT_THROW(check_sobolev_morrey(greens, op, u, 2.0 * n), ConfigInvalid);
  }
}

TEST(ChengLi, FloorClosedFormAndSolution) {
  EXPECT_NEAR(chengli_floor(1.0, 0.0, 2, 0.0), 1.0, 1e-15);
  EXPECT_NEAR(chengli_floor(1.0, 2.0, 2, 0.5), std::pow(2.0, -2) * std::exp(-0.5), 1e-15);
  const GridSpec g(1, 32);
  const auto bg = BackgroundGeometry::fixed_class(g);
  FamilySpec spec;
  const MAProblem p{bg, normalize_density(family_density(g, spec, 0.0), bg)};
  const auto r = check_chengli_corollary(solve_ma(p, 1e-12, 10), bg);
  EXPECT_TRUE(r.lower_bound);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.quantity("inf_eF"), std::exp(p.F.min()), 1e-9);
}

TEST(AprioriSweeps, DriftAndUniformity) {
  std::vector<SweepSample> s(3);
  for (int k = 0; k < 3; ++k) s[k] = {{{"delta", 0.1 * k}}, 1.0 + 0.01 * k, 1.0 + k, 2.0, 0.5};
  const auto reps = check_apriori_sweeps(s);
  ASSERT_EQ(reps.size(), 4u);
  EXPECT_EQ(reps[0].check, "budget_drift");
  EXPECT_NEAR(reps[0].value, 0.02 / 1.02, 1e-15);
  EXPECT_EQ(reps[1].check, "uniformity_sup_H");
  EXPECT_NEAR(reps[1].value, 1.5, 1e-15);
  for (const auto& r : reps) EXPECT_TRUE(r.pass);
  s[2].budget = 2.0;
  EXPECT_THROW(check_apriori_sweeps(s), BudgetDrift);
  EXPECT_THROW(check_apriori_sweeps({}), Error);
}

TEST(PowerFit, RecoversExactPowerLaw) {
  std::vector<double> x, y;
  for (double d : {1e-1, 1e-2, 1e-3, 1e-4}) {
    x.push_back(d);
    y.push_back(3.0 * std::pow(d, -0.7));
  }
  const auto f = fit_power_law(x, y);
  EXPECT_NEAR(f.slope, -0.7, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-12);
  EXPECT_NEAR(f.r2, 1.0, 1e-12);
  EXPECT_THROW(fit_power_law({1.0}, {1.0}), Error);
}

TEST(LqIteration, ExponentApproachesCriticalValue) {
  EXPECT_TRUE(std::isinf(lq_exponent_bound(1, 3)));
  double prev = 0.0;
  for (int l = 0; l < 30; ++l) {
    const double b = lq_exponent_bound(2, l);
    EXPECT_NEAR(b, 2.0 - std::pow(0.5, l + 1), 1e-15);
    EXPECT_GT(b, prev);
    prev = b;
  }
  EXPECT_NEAR(prev, 2.0, 1e-8);
}

TEST(Report, UpperLowerMargins) {
  const auto u = VerificationReport::upper("u", 1.0, 2.0, 0.0);
  EXPECT_EQ(u.margin, 1.0);
  EXPECT_TRUE(u.pass);
  const auto l = VerificationReport::lower("l", 1.0, 2.0, 0.5);
  EXPECT_EQ(l.margin, -1.0);
  EXPECT_FALSE(l.pass);
  EXPECT_TRUE(VerificationReport::lower("l", 1.0, 1.2, 0.5).pass);
  EXPECT_THROW(u.quantity("missing"), Error);
}
