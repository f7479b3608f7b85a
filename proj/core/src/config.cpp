#include "kgl/config.hpp"

#include "json.hpp"

#include <cmath>
#include <set>

#include "kgl/errors.hpp"
#include "kgl/field_cache.hpp"

namespace kgl {
namespace {

using nlohmann::ordered_json;

void reject_unknown(const ordered_json& j, const std::string& where, std::set<std::string> known) {
  if (!j.is_object()) throw ConfigInvalid("config: " + where + " must be an object");
  for (auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigInvalid("config: unknown key '" + (where.empty() ? k : where + "." + k) + "'");
}

template <class T>
void take(const ordered_json& j, const char* key, T& dst, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    dst = j.at(key).get<T>();
  } catch (const ordered_json::exception&) {
    throw ConfigInvalid("config: bad value for '" + where + key + "'");
  }
}

ordered_json to_json(const RunConfig& c) {
  const FamilySpec& f = c.family;
  ordered_json j;
  j["grid"] = {{"n", c.n}, {"m", c.m}};
  ordered_json chi = ordered_json::array();
  for (const auto& e : f.chi_eigenvalues) chi.push_back({e[0], e[1]});
  j["background"] = {{"chi_eigenvalues", chi}, {"t_values", f.t_values}};
  j["family"] = {{"kind", to_string(f.kind)},   {"amplitude", f.amplitude},
                 {"max_mode", f.max_mode},      {"bump_kappa", f.bump_kappa},
                 {"shape", to_string(f.shape)}, {"a", f.a},
                 {"well_exponent", f.well_exponent}, {"deltas", f.deltas},
                 {"centre", f.centre},          {"hold_budget_p", f.hold_budget_p}};
  j["class"] = {{"p", f.params.p},
                {"N", f.params.N},
                {"epsilon", f.params.epsilon},
                {"gamma", f.params.gamma},
                {"delta", c.class_delta}};
  j["solver"] = {{"ma_tol", c.solver.ma_tol},
                 {"ma_max_iter", c.solver.ma_max_iter},
                 {"cg_tol", c.solver.cg_tol},
                 {"green_tol", c.solver.green_tol},
                 {"green_max_iter", c.solver.green_max_iter}};
  j["checks"] = {{"sources", c.sources},
                 {"betas", c.betas},
                 {"gradient_identity_tol", c.gradient_identity_tol},
                 {"degiorgi_p", c.degiorgi_p},
                 {"sobolev_p", c.sobolev_p},
                 {"uniformity_factor", c.uniformity_factor},
                 {"budget_drift", c.budget_drift},
                 {"lambda", c.lambda},
                 {"mu", c.mu}};
  ordered_json ex = ordered_json::array();
  for (const auto& e : c.examples) ex.push_back({{"a", e.a}, {"n", e.n}, {"p", e.p}});
  j["examples"] = {{"blocks", ex}, {"deltas", c.example_deltas}};
  j["out"] = c.out;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  return j;
}

}  // namespace

void RunConfig::validate() const {
  try {
    GridSpec grid(n, m);
  } catch (const ConfigInvalid& e) {
    throw ConfigInvalid(std::string("config: grid: ") + e.what());
  }
  family.validate();
  if (!(class_delta > 0.0 && class_delta < 0.5)) throw ConfigInvalid("config: class.delta must lie in (0, 1/2)");
  if (!(solver.ma_tol > 0.0) || !(solver.cg_tol > 0.0 && solver.cg_tol < 1.0) || !(solver.green_tol > 0.0))
    throw ConfigInvalid("config: solver tolerances must be positive (cg_tol < 1)");
  if (solver.ma_max_iter < 1 || solver.green_max_iter < 1)
    throw ConfigInvalid("config: solver iteration limits must be positive");
  if (sources < 0) throw ConfigInvalid("config: checks.sources must be >= 0");
  for (double b : betas)
    if (!(b > 0.0)) throw ConfigInvalid("config: betas must be positive");
  if (!(gradient_identity_tol >= 0.0)) throw ConfigInvalid("config: gradient_identity_tol must be >= 0");
  if (!(degiorgi_p > n)) throw ConfigInvalid("config: degiorgi_p must exceed n");
  if (!(sobolev_p > 2 * n)) throw ConfigInvalid("config: sobolev_p must exceed 2n");
  if (!(uniformity_factor >= 1.0)) throw ConfigInvalid("config: uniformity_factor must be >= 1");
  if (!(budget_drift > 0.0)) throw ConfigInvalid("config: budget_drift must be positive");
  for (const auto& e : examples) {
    if (!(e.a > 0.0 && e.a <= 1.0) || e.n < 1 || !(e.p > 0.0))
      throw ConfigInvalid("config: example block needs a in (0, 1], n >= 1, p > 0");
  }
  if (!examples.empty() && example_deltas.size() < 2)
    throw ConfigInvalid("config: examples.deltas needs at least two values");
  for (double d : example_deltas)
    if (!(d > 0.0 && d <= 1e-2)) throw ConfigInvalid("config: example deltas must lie in (0, 1/100]");
  if (out.empty()) throw ConfigInvalid("config: out must not be empty");
  if (workers < 1) throw ConfigInvalid("config: workers must be >= 1");
}

RunConfig parse_config(std::string_view text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::exception& e) {
    throw ConfigInvalid(std::string("config: not valid JSON: ") + e.what());
  }
  RunConfig c;
  FamilySpec& f = c.family;
  reject_unknown(j, "", {"grid", "background", "family", "class", "solver", "checks", "examples", "out", "seed",
                         "workers"});
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    reject_unknown(g, "grid", {"n", "m"});
    take(g, "n", c.n, "grid.");
    take(g, "m", c.m, "grid.");
  }
  if (j.contains("background")) {
    const auto& b = j["background"];
    reject_unknown(b, "background", {"chi_eigenvalues", "t_values"});
    take(b, "chi_eigenvalues", f.chi_eigenvalues, "background.");
    take(b, "t_values", f.t_values, "background.");
  }
  if (j.contains("family")) {
    const auto& s = j["family"];
    reject_unknown(s, "family", {"kind", "amplitude", "max_mode", "bump_kappa", "shape", "a", "well_exponent",
                                 "deltas", "centre", "hold_budget_p"});
    std::string kind = to_string(f.kind), shape = to_string(f.shape);
    take(s, "kind", kind, "family.");
    take(s, "shape", shape, "family.");
    f.kind = family_kind_from_string(kind);
    f.shape = profile_shape_from_string(shape);
    take(s, "amplitude", f.amplitude, "family.");
    take(s, "max_mode", f.max_mode, "family.");
    take(s, "bump_kappa", f.bump_kappa, "family.");
    take(s, "a", f.a, "family.");
    take(s, "well_exponent", f.well_exponent, "family.");
    take(s, "deltas", f.deltas, "family.");
    take(s, "centre", f.centre, "family.");
    take(s, "hold_budget_p", f.hold_budget_p, "family.");
  }
  if (j.contains("class")) {
    const auto& s = j["class"];
    reject_unknown(s, "class", {"p", "N", "epsilon", "gamma", "delta"});
    take(s, "p", f.params.p, "class.");
    take(s, "N", f.params.N, "class.");
    take(s, "epsilon", f.params.epsilon, "class.");
    take(s, "gamma", f.params.gamma, "class.");
    take(s, "delta", c.class_delta, "class.");
  }
  if (j.contains("solver")) {
    const auto& s = j["solver"];
    reject_unknown(s, "solver", {"ma_tol", "ma_max_iter", "cg_tol", "green_tol", "green_max_iter"});
    take(s, "ma_tol", c.solver.ma_tol, "solver.");
    take(s, "ma_max_iter", c.solver.ma_max_iter, "solver.");
    take(s, "cg_tol", c.solver.cg_tol, "solver.");
    take(s, "green_tol", c.solver.green_tol, "solver.");
    take(s, "green_max_iter", c.solver.green_max_iter, "solver.");
  }
  if (j.contains("checks")) {
    const auto& s = j["checks"];
    reject_unknown(s, "checks", {"sources", "betas", "gradient_identity_tol", "degiorgi_p", "sobolev_p",
                                 "uniformity_factor", "budget_drift", "lambda", "mu"});
    take(s, "sources", c.sources, "checks.");
    take(s, "betas", c.betas, "checks.");
    take(s, "gradient_identity_tol", c.gradient_identity_tol, "checks.");
    take(s, "degiorgi_p", c.degiorgi_p, "checks.");
    take(s, "sobolev_p", c.sobolev_p, "checks.");
    take(s, "uniformity_factor", c.uniformity_factor, "checks.");
    take(s, "budget_drift", c.budget_drift, "checks.");
    take(s, "lambda", c.lambda, "checks.");
    take(s, "mu", c.mu, "checks.");
  }
  if (j.contains("examples")) {
    const auto& s = j["examples"];
    reject_unknown(s, "examples", {"blocks", "deltas"});
    if (s.contains("blocks")) {
      if (!s["blocks"].is_array()) throw ConfigInvalid("config: examples.blocks must be an array");
      c.examples.clear();
      for (const auto& b : s["blocks"]) {
        reject_unknown(b, "examples.blocks[]", {"a", "n", "p"});
        ExampleBlock e;
        take(b, "a", e.a, "examples.blocks[].");
        take(b, "n", e.n, "examples.blocks[].");
        take(b, "p", e.p, "examples.blocks[].");
        c.examples.push_back(e);
      }
    }
    take(s, "deltas", c.example_deltas, "examples.");
  }
  take(j, "out", c.out, "");
  take(j, "seed", c.seed, "");
  take(j, "workers", c.workers, "");
  f.seed = c.seed;
  return c;
}

std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

std::uint64_t config_hash(const RunConfig& c) {
  ordered_json j = to_json(c);
  j.erase("out");
  j.erase("workers");
  return fnv1a(j.dump());
}

}  // namespace kgl
