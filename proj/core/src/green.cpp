#include "kgl/green.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>

#include "kgl/errors.hpp"
#include "kgl/geometry.hpp"
#include "kgl/parallel.hpp"

namespace kgl {

ScalarField GreenField::positive() const {
  ScalarField out = G;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += C_l + 1.0;
  return out;
}

GreenField solve_green(const LaplacianOperator& op, std::size_t x, double tol, int max_iter) {
  const GridSpec& g = op.grid();
  if (x >= g.size()) throw Error("green: source index out of range");
  const ScalarField& mu = op.mass();
  const double vol = op.volume();
  std::vector<double> b(g.size());
  for (std::size_t y = 0; y < g.size(); ++y) b[y] = -mu[y] / vol;
  b[x] += 1.0;

  GreenField out{x, ScalarField(g), 0.0, ScalarField(g), 0, 0.0};
  const CgResult cg = op.solve(b, out.G.values(), tol, max_iter);
  if (!cg.converged) throw NotConverged("green solve", cg.iterations, cg.residual);

  const double mean = integrate(out.G, mu) / vol;
  for (std::size_t y = 0; y < g.size(); ++y) out.G[y] -= mean;
  GreenField done = green_from_values(op, x, std::move(out.G));
  done.iterations = cg.iterations;
  done.residual = cg.residual;
  return done;
}

GreenField green_from_values(const LaplacianOperator& op, std::size_t x, ScalarField G) {
  if (!(G.grid() == op.grid()) || x >= G.size()) throw Error("green: stored field does not match the operator");
  GreenField out{x, std::move(G), 0.0, ScalarField(op.grid()), 0, 0.0};
  out.C_l = -out.G.min();
  out.gradnorm = metric_gradient_normsq(out.G, op.metric());
  for (std::size_t y = 0; y < out.G.size(); ++y) out.gradnorm[y] = std::sqrt(out.gradnorm[y]);
  return out;
}

std::vector<GreenField> solve_greens(const LaplacianOperator& op, const std::vector<std::size_t>& sources,
                                     double tol, int workers, int max_iter) {
  std::vector<std::optional<GreenField>> slots(sources.size());
  parallel_for(sources.size(), workers,
               [&](std::size_t k) { slots[k] = solve_green(op, sources[k], tol, max_iter); });
  std::vector<GreenField> out;
  out.reserve(slots.size());
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

double representation_check(const LaplacianOperator& op, const std::vector<GreenField>& greens,
                            const ScalarField& u) {
  const ScalarField& mu = op.mass();
  const double avg = integrate(u, mu) / op.volume();
  double worst = 0.0;
  for (const GreenField& gf : greens) {
    const ScalarField inner = metric_gradient_inner(gf.G, u, op.metric());
    const double rhs = integrate(inner, mu);
    worst = std::max(worst, std::abs(u[gf.source] - avg - rhs));
  }
  return worst;
}

std::vector<std::size_t> sample_sources(const ScalarField& F, int random_count, std::uint64_t seed) {
  const std::size_t N = F.size();
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> out;
  auto push = [&](std::size_t i) {
    if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
  };
  for (int k = 0; k < random_count; ++k) push(static_cast<std::size_t>(rng() % N));
  push(F.argmax());
  push(F.argmin());
  return out;
}

}  // namespace kgl
