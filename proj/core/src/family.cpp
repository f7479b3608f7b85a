#include "kgl/family.hpp"

#include <boost/math/tools/roots.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Uniform in [-1, 1) from the raw 64-bit stream; independent of the
// standard library's distribution implementation.
double uniform_pm1(std::mt19937_64& rng) {
  return 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53 - 1.0;
}

std::array<double, 4> resolve_centre(const GridSpec& grid, const std::array<double, 4>& c) {
  std::array<double, 4> out = c;
  for (int a = 0; a < grid.axes(); ++a)
    if (out[a] < 0.0) out[a] = 0.5 + 0.5 * grid.h();
  return out;
}

Hermitian from_real_hessian(int n, const std::array<double, 16>& R) {
  auto r = [&](int a, int b) { return R[a * 4 + b]; };
  if (n == 1) return Hermitian::make(1, 0.25 * (r(0, 0) + r(1, 1)));
  return Hermitian::make(2, 0.25 * (r(0, 0) + r(1, 1)), 0.25 * (r(2, 2) + r(3, 3)),
                         Complex(0.25 * (r(0, 2) + r(1, 3)), 0.25 * (r(0, 3) - r(1, 2))));
}

ScalarField band_limited(const GridSpec& grid, const FamilySpec& spec) {
  const int d = grid.axes();
  const int K = spec.max_mode;
  std::mt19937_64 rng(spec.seed);
  std::vector<std::array<int, 4>> modes;
  std::vector<double> ca, cb;
  std::array<int, 4> k{};
  const int side = 2 * K + 1;
  int total = 1;
  for (int a = 0; a < d; ++a) total *= side;
  for (int code = 0; code < total; ++code) {
    int rest = code;
    for (int a = d - 1; a >= 0; --a) {
      k[a] = rest % side - K;
      rest /= side;
    }
    // Keep one of each +-k pair: first nonzero component positive.
    int first = 0;
    for (int a = 0; a < d && first == 0; ++a) first = k[a];
    if (first <= 0) continue;
    double norm2 = 0.0;
    for (int a = 0; a < d; ++a) norm2 += k[a] * k[a];
    modes.push_back(k);
    ca.push_back(uniform_pm1(rng) / (1.0 + norm2));
    cb.push_back(uniform_pm1(rng) / (1.0 + norm2));
  }
  ScalarField F(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double s = 0.0;
    for (std::size_t m = 0; m < modes.size(); ++m) {
      double phase = 0.0;
      for (int a = 0; a < d; ++a) phase += modes[m][a] * grid.position(i, a);
      phase *= kTwoPi;
      s += ca[m] * std::cos(phase) + cb[m] * std::sin(phase);
    }
    F[i] = s;
  }
  double top = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) top = std::max(top, std::abs(F[i]));
  const double scale = top > 0.0 ? spec.amplitude / top : 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= scale;
  return F;
}

}  // namespace

double PeriodicBump::value(const GridSpec& grid, std::size_t i) const {
  double s = 0.0;
  for (int a = 0; a < grid.axes(); ++a) s += std::cos(kTwoPi * (grid.position(i, a) - centre[a])) - 1.0;
  return std::exp(kappa * s);
}

Hermitian PeriodicBump::complex_hessian(const GridSpec& grid, std::size_t i) const {
  const int d = grid.axes();
  const double b = value(grid, i);
  std::array<double, 4> s{}, c{};
  for (int a = 0; a < d; ++a) {
    const double th = kTwoPi * (grid.position(i, a) - centre[a]);
    s[a] = std::sin(th);
    c[a] = std::cos(th);
  }
  std::array<double, 16> R{};
  const double k1 = kTwoPi * kappa;
  for (int a = 0; a < d; ++a)
    for (int e = 0; e < d; ++e) {
      double v = k1 * k1 * s[a] * s[e];
      if (a == e) v -= kTwoPi * kTwoPi * kappa * c[a];
      R[a * 4 + e] = b * v;
    }
  return from_real_hessian(grid.n(), R);
}

ScalarField PeriodicBump::sample(const GridSpec& grid) const {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = value(grid, i);
  return out;
}

ScalarField periodic_radius_squared(const GridSpec& grid, const std::array<double, 4>& centre) {
  ScalarField out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r = 0.0;
    for (int a = 0; a < grid.axes(); ++a) {
      const double s = std::sin(std::numbers::pi * (grid.position(i, a) - centre[a])) / std::numbers::pi;
      r += s * s;
    }
    out[i] = r;
  }
  return out;
}

ManufacturedProblem manufactured_problem(const BackgroundGeometry& background, const PeriodicBump& bump,
                                         double scale) {
  const GridSpec& g = background.grid();
  const Hermitian omega_hat = background.omega_hat();
  const double ref = std::log(background.omega_x().det()) + std::log(background.c_t());
  ScalarField F(g);
  ScalarField phi(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Hermitian metric = omega_hat + bump.complex_hessian(g, i) * scale;
    if (!(metric.min_eigenvalue() > 0.0)) throw ConfigInvalid("manufactured potential leaves the Kahler cone");
    F[i] = std::log(metric.det()) - ref;
    phi[i] = scale * bump.value(g, i);
  }
  return {MAProblem{background, normalize_density(F, background)}, std::move(phi)};
}

std::string to_string(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::band_limited: return "band_limited";
    case FamilyKind::radial_bump: return "radial_bump";
    case FamilyKind::near_singular: return "near_singular";
  }
  return "band_limited";
}

std::string to_string(ProfileShape shape) { return shape == ProfileShape::peak ? "peak" : "well"; }

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "band_limited") return FamilyKind::band_limited;
  if (s == "radial_bump") return FamilyKind::radial_bump;
  if (s == "near_singular") return FamilyKind::near_singular;
  throw ConfigInvalid("family: unknown generator kind '" + s + "'");
}

ProfileShape profile_shape_from_string(const std::string& s) {
  if (s == "peak") return ProfileShape::peak;
  if (s == "well") return ProfileShape::well;
  throw ConfigInvalid("family: unknown profile shape '" + s + "'");
}

void FamilySpec::validate() const {
  if (!std::isfinite(amplitude) || amplitude < 0.0) throw ConfigInvalid("family: amplitude must be >= 0");
  if (max_mode < 1) throw ConfigInvalid("family: max_mode must be >= 1");
  if (t_values.empty() || chi_eigenvalues.empty()) throw ConfigInvalid("family: empty sweep list");
  for (double t : t_values)
    if (!(t > 0.0 && t <= 1.0)) throw ConfigInvalid("family: t must lie in (0, 1]");
  for (const auto& e : chi_eigenvalues)
    if (e[0] < 0.0 || e[1] < 0.0) throw ConfigInvalid("family: chi eigenvalues must be >= 0");
  if (hold_budget_p < 0.0 || (hold_budget_p > 0.0 && kind != FamilyKind::near_singular))
    throw ConfigInvalid("family: hold_budget_p needs a near_singular family and p > 0");
  if (kind == FamilyKind::near_singular) {
    if (!(a > 0.0 && a <= 1.0)) throw ConfigInvalid("family: profile exponent a must lie in (0, 1]");
    if (deltas.empty()) throw ConfigInvalid("family: empty delta list");
    for (double d : deltas)
      if (!(d > 0.0)) throw ConfigInvalid("family: delta must be positive");
  }
  params.validate();
}

double calibrate_scale(const ScalarField& raw, const BackgroundGeometry& background, double p, double target) {
  auto gap = [&](double s) {
    ScalarField F = raw;
    for (std::size_t i = 0; i < F.size(); ++i) F[i] *= s;
    return gradient_lp_norm(normalize_density(F, background), background, p) - target;
  };
  double hi = 1.0;
  while (gap(hi) < 0.0) {
    hi *= 2.0;
    if (hi > 1e6) throw ConfigInvalid("family: cannot reach the held budget");
  }
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(gap, 0.0, hi, -target, gap(hi),
                                                   boost::math::tools::eps_tolerance<double>(48), iters);
  return 0.5 * (r.first + r.second);
}

ScalarField family_density(const GridSpec& grid, const FamilySpec& spec, double delta) {
  switch (spec.kind) {
    case FamilyKind::band_limited:
      return band_limited(grid, spec);
    case FamilyKind::radial_bump: {
      const PeriodicBump bump{resolve_centre(grid, spec.centre), spec.bump_kappa};
      ScalarField F = bump.sample(grid);
      for (std::size_t i = 0; i < F.size(); ++i) F[i] *= spec.amplitude;
      return F;
    }
    case FamilyKind::near_singular: {
      const ScalarField rho = periodic_radius_squared(grid, resolve_centre(grid, spec.centre));
      const double n = grid.n(), a = spec.a;
      ScalarField F(grid);
      for (std::size_t i = 0; i < F.size(); ++i) {
        const double r = rho[i];
        double logp;
        if (spec.shape == ProfileShape::peak)
          logp = n * std::log(a) + std::log(a * r + delta) - (n - a * n + 1.0) * std::log(r + delta);
        else
          logp = spec.well_exponent * std::log(r + delta);
        F[i] = spec.amplitude * logp;
      }
      return F;
    }
  }
  return ScalarField(grid);
}

std::vector<FamilyMember> generate_family(const GridSpec& grid, const FamilySpec& spec,
                                          const Hermitian& omega_x) {
  spec.validate();
  const std::vector<double> deltas =
      spec.kind == FamilyKind::near_singular ? spec.deltas : std::vector<double>{0.0};
  std::vector<ScalarField> raw;
  raw.reserve(deltas.size());
  for (double d : deltas) raw.push_back(family_density(grid, spec, d));
  std::vector<double> scales(deltas.size(), 1.0);

  std::vector<FamilyMember> out;
  for (double t : spec.t_values) {
    for (const auto& e : spec.chi_eigenvalues) {
      const Hermitian chi = grid.n() == 1 ? Hermitian::make(1, e[0]) : Hermitian::make(2, e[0], e[1]);
      const BackgroundGeometry bg(grid, omega_x, chi, t);
      if (spec.hold_budget_p > 0.0) {
        const double target = gradient_lp_norm(normalize_density(raw[0], bg), bg, spec.hold_budget_p);
        for (std::size_t k = 1; k < deltas.size(); ++k)
          scales[k] = calibrate_scale(raw[k], bg, spec.hold_budget_p, target);
      }
      for (std::size_t k = 0; k < deltas.size(); ++k) {
        ScalarField F = raw[k];
        for (std::size_t i = 0; i < F.size(); ++i) F[i] *= scales[k];
        MAProblem problem{bg, normalize_density(F, bg)};
        problem.validate();
        FamilyMember m{problem, t, e, deltas[k], scales[k], class_membership(problem.F, bg, spec.params)};
        out.push_back(std::move(m));
      }
    }
  }
  return out;
}

}  // namespace kgl
