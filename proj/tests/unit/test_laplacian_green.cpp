#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kgl/errors.hpp"
#include "kgl/family.hpp"
#include "kgl/geometry.hpp"
#include "kgl/green.hpp"
#include "kgl/laplacian.hpp"
#include "oracles.hpp"

using namespace kgl;
using oracle::pi;

namespace {

MetricField bumpy_metric(const GridSpec& g, double scale = 1.0) {
  FamilySpec spec;
  spec.seed = 5;
  spec.amplitude = 0.004;
  const ScalarField phi = family_density(g, spec, 0.0);
  MetricField m = metric_from_potential(Hermitian::identity(g.n()), phi);
  for (double& v : m.raw()) v *= scale;
  return m;
}

std::vector<double> impulse_response(const LaplacianOperator& op) {
  std::vector<double> e(op.grid().size(), 0.0), out(op.grid().size());
  e[0] = 1.0;
  op.apply(e, out);
  return out;
}

std::array<double, 4> theta(const GridSpec& g, std::size_t k) {
  std::array<double, 4> th{};
  for (int a = 0; a < g.axes(); ++a) th[a] = 2.0 * pi * g.coord(k, a) / g.m();
  return th;
}

}  // namespace

TEST(PeriodicFFT, IdentityAndInverseSymbolRoundTrip) {
  const GridSpec g(2, 8);
  PeriodicFFT fft(g);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N01;
  std::vector<double> u(g.size()), out(g.size());
  double mean = 0.0;
  for (double& v : u) mean += (v = N01(rng));
  mean /= static_cast<double>(g.size());
  const std::vector<double> ones(fft.spectrum_size(), 1.0);
  fft.filter(u, ones, out);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(out[i], u[i], 1e-13);

  auto symbol = [](const std::array<double, 4>& th) {
    double s = 0.0;
    for (double t : th) s += 2.0 - 2.0 * std::cos(t);
    return s;
  };
  auto fwd = fft.tabulate(symbol);
  auto inv = fft.tabulate([&](const auto& th) { const double s = symbol(th); return s > 0 ? 1.0 / s : 0.0; });
  std::vector<double> mid(g.size());
  fft.filter(u, fwd, mid);
  fft.filter(mid, inv, out);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(out[i], u[i] - mean, 1e-12);
}

TEST(Laplacian, FlatOneDimStencil) {
  const GridSpec g(1, 16);
  const LaplacianOperator op(MetricField(g, Hermitian::identity(1)));
  const auto k0 = impulse_response(op);
  EXPECT_NEAR(k0[0], 2.0, 1e-14);
  for (int a = 0; a < 2; ++a) {
    EXPECT_NEAR(k0[g.shift(0, a, 1)], -0.5, 1e-14);
    EXPECT_NEAR(k0[g.shift(0, a, -1)], -0.5, 1e-14);
  }
  double rest = 0.0;
  for (double v : k0) rest += std::abs(v);
  EXPECT_NEAR(rest, 4.0, 1e-13);
}

TEST(Laplacian, ConstantMetricEigenvaluesMatchNaiveDFT) {
  const GridSpec g(2, 8);
  const Hermitian gm = Hermitian::make(2, 1.3, 0.8, {0.2, -0.35});
  const LaplacianOperator op(MetricField(g, gm));
  const auto lam = oracle::circulant_eigenvalues(g, impulse_response(op));
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(lam[k], op.mean_symbol(theta(g, k)), 1e-10);
    if (k) EXPECT_GT(lam[k], 0.0);
  }
  EXPECT_NEAR(lam[0], 0.0, 1e-12);
}

TEST(Laplacian, KillsConstantsAndIsSymmetric) {
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const LaplacianOperator op(bumpy_metric(g));
    const ScalarField Kc = op.apply(ScalarField(g, 2.5));
    for (double v : Kc.values()) EXPECT_LE(std::abs(v), 1e-12);

    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(-1, 1);
    ScalarField u(g), v(g);
    for (std::size_t i = 0; i < g.size(); ++i) u[i] = U(rng), v[i] = U(rng);
    const ScalarField Ku = op.apply(u), Kv = op.apply(v);
    double a = 0.0, b = 0.0, uKu = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) a += v[i] * Ku[i], b += u[i] * Kv[i], uKu += u[i] * Ku[i];
    EXPECT_NEAR(a, b, 1e-12 * std::abs(a) + 1e-14);
    EXPECT_GT(uKu, 0.0);
  }
}

TEST(Green, MatchesNaiveLatticeGreenOneDim) {
  const GridSpec g(1, 64);
  const LaplacianOperator op(MetricField(g, Hermitian::identity(1)));
  const auto lam = oracle::circulant_eigenvalues(g, impulse_response(op));
  const std::size_t x = g.index(std::array<int, 2>{10, 37});
  const auto want = oracle::lattice_green(g, lam, x);
  const GreenField gf = solve_green(op, x, 1e-12);
  for (std::size_t y = 0; y < g.size(); ++y) EXPECT_NEAR(gf.G[y], want[y], 1e-8);
}

TEST(Green, LogarithmicProfileOneDim) {
  // Continuum limit -(1/pi) log r: fit the slope on 4h <= r <= 1/8.
  const GridSpec g(1, 128);
  const LaplacianOperator op(MetricField(g, Hermitian::identity(1)));
  const std::size_t x = g.index(std::array<int, 2>{64, 64});
  const GreenField gf = solve_green(op, x, 1e-11);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int d = 4; d <= 16; ++d) {
    const double lr = std::log(d * g.h());
    const double G = gf.G[g.shift(x, 0, d)];
    sx += lr, sy += G, sxx += lr * lr, sxy += lr * G, ++cnt;
  }
  const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  EXPECT_NEAR(slope, -1.0 / pi, 0.1 / pi);
}

TEST(Green, NormalisationAndSymmetry) {
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const LaplacianOperator op(bumpy_metric(g));
    const std::size_t x = 3, y = g.size() / 2 + 5;
    const GreenField gx = solve_green(op, x, 1e-11), gy = solve_green(op, y, 1e-11);
    EXPECT_NEAR(integrate(gx.G, op.mass()), 0.0, 1e-10);
    EXPECT_NEAR(gx.G[y], gy.G[x], 1e-8 * std::abs(gx.G[y]));
    EXPECT_NEAR(gx.C_l, -gx.G.min(), 0.0);
    EXPECT_GE(gx.positive().min(), 1.0 - 1e-14);
    EXPECT_EQ(gx.G.argmax(), x);
    // K G = e_x - mu / V.
    const ScalarField KG = op.apply(gx.G);
    for (std::size_t i = 0; i < g.size(); ++i)
      EXPECT_NEAR(KG[i], (i == x ? 1.0 : 0.0) - op.mass()[i] / op.volume(), 1e-9);
  }
}

TEST(Green, ScalingCovariance) {
  // g -> lambda g multiplies G by lambda^{1 - n}.
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const double lambda = 2.5;
    const LaplacianOperator a(bumpy_metric(g)), b(bumpy_metric(g, lambda));
    const GreenField ga = solve_green(a, 7, 1e-12), gb = solve_green(b, 7, 1e-12);
    const double factor = std::pow(lambda, 1 - n);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(gb.G[i], factor * ga.G[i], 1e-8);
  }
}

TEST(Green, RepresentationFormula) {
  for (int n : {1, 2}) {
    const GridSpec g(n, n == 1 ? 32 : 8);
    const LaplacianOperator op(bumpy_metric(g));
    FamilySpec spec;
    spec.seed = 21;
    const ScalarField u = family_density(g, spec, 0.0);
    const auto sources = sample_sources(u, 4, 3);
    EXPECT_EQ(sources.size(), 6u);
    const auto greens = solve_greens(op, sources, 1e-12);
    EXPECT_LE(representation_check(op, greens, u), 1e-9);
  }
}

TEST(Green, PreconditionersAgree) {
  const GridSpec g(2, 8);
  const MetricField metric = bumpy_metric(g);
  const LaplacianOperator fft(metric, Preconditioner::fft), jac(metric, Preconditioner::jacobi),
      none(metric, Preconditioner::none);
  const GreenField a = solve_green(fft, 11, 1e-11), b = solve_green(jac, 11, 1e-11), c = solve_green(none, 11, 1e-11);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_NEAR(a.G[i], b.G[i], 1e-8);
    EXPECT_NEAR(a.G[i], c.G[i], 1e-8);
  }
  EXPECT_LE(a.iterations, b.iterations);
}

TEST(Green, NotConvergedIsReported) {
  const GridSpec g(2, 8);
  const LaplacianOperator op(bumpy_metric(g), Preconditioner::none);
  EXPECT_THROW(solve_green(op, 0, 1e-12, 2), NotConverged);
}

TEST(Green, ParallelSolvesMatchSerial) {
  const GridSpec g(1, 32);
  const LaplacianOperator op(bumpy_metric(g));
  const std::vector<std::size_t> src{1, 100, 500, 900};
  const auto a = solve_greens(op, src, 1e-11, 1), b = solve_greens(op, src, 1e-11, 3);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    EXPECT_EQ(a[k].source, src[k]);
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(a[k].G[i], b[k].G[i]);
  }
}
