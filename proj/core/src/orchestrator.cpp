#include "kgl/orchestrator.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include "kgl/errors.hpp"
#include "kgl/field_cache.hpp"
#include "kgl/geometry.hpp"
#include "kgl/parallel.hpp"
#include "kgl/report.hpp"

namespace kgl {
namespace {

namespace fs = std::filesystem;

std::string bits(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string describe(const BackgroundGeometry& bg) {
  std::string s;
  for (const Hermitian* h : {&bg.omega_x(), &bg.chi()}) {
    for (int i = 0; i < h->n(); ++i) s += bits(h->diag(i)) + ",";
    s += bits(h->off().real()) + "," + bits(h->off().imag()) + ";";
  }
  return s + bits(bg.t());
}

class Session {
 public:
  Session(const RunConfig& config, std::ostream& log)
      : config_(config),
        grid_(config.n, config.m),
        cache_(FieldCache::from_environment(fs::path(config.out) / "cache")),
        log_(log) {}

  const RunConfig& config() const { return config_; }
  const GridSpec& grid() const { return grid_; }

  std::vector<FamilyMember> family() const {
    return generate_family(grid_, config_.family, Hermitian::identity(grid_.n()));
  }

  NamedValues coordinates(const FamilyMember& m) const {
    NamedValues c{{"t", m.t}, {"chi1", m.chi[0]}};
    if (grid_.n() == 2) c.emplace_back("chi2", m.chi[1]);
    c.emplace_back("delta", m.delta);
    c.emplace_back("scale", m.scale);
    return c;
  }

  std::string coordinate_text(const FamilyMember& m) const {
    std::ostringstream os;
    os << "member";
    for (const auto& [k, v] : coordinates(m)) os << ' ' << k << '=' << v;
    return os.str();
  }

  MASolution solve(const MAProblem& problem) const {
    const auto& s = config_.solver;
    const std::uint64_t key = fnv1a(encode_scalar(problem.F) + describe(problem.background) + bits(s.ma_tol) +
                                    std::to_string(s.ma_max_iter) + bits(s.cg_tol));
    if (auto phi = cache_.load_scalar("phi", key)) {
      say("cache hit phi-" + hex64(key));
      return solution_from_potential(problem, std::move(*phi));
    }
    SolverSettings settings;
    settings.cg_tol = s.cg_tol;
    MASolution sol = solve_ma(problem, s.ma_tol, s.ma_max_iter, settings);
    cache_.store_scalar("phi", key, sol.phi);
    say("solved phi-" + hex64(key) + " in " + std::to_string(sol.iterations) + " steps");
    return sol;
  }

  std::vector<GreenField> greens(const LaplacianOperator& op, const std::vector<std::size_t>& sources) const {
    const auto& s = config_.solver;
    const std::string base = encode_metric(op.metric()) + bits(s.green_tol) + std::to_string(s.green_max_iter);
    const std::uint64_t metric_key = fnv1a(base);
    std::vector<GreenField> out;
    for (std::size_t x : sources) {
      const std::uint64_t key = fnv1a(hex64(metric_key) + ":" + std::to_string(x));
      if (auto payload = cache_.load("green", key)) {
        auto [G, src] = decode_green(*payload);
        if (src != x) throw CacheCorrupt("cache: green source mismatch for green-" + hex64(key));
        out.push_back(green_from_values(op, x, std::move(G)));
        continue;
      }
      GreenField gf = solve_green(op, x, s.green_tol, s.green_max_iter);
      cache_.store("green", key, encode_green(gf.G, x));
      out.push_back(std::move(gf));
    }
    return out;
  }

  void say(const std::string& msg) const {
    std::lock_guard<std::mutex> lock(log_mutex_);
    log_ << "[kgl] " << msg << '\n';
  }

  /// Runs job(k) for every member on the worker pool, attaching member
  /// coordinates to any library error.
  template <class Job>
  void for_members(const std::vector<FamilyMember>& members, Job&& job) const {
    parallel_for(members.size(), config_.workers, [&](std::size_t k) {
      try {
        job(k);
      } catch (const JobFailed&) {
        throw;
      } catch (const Error& e) {
        throw JobFailed(coordinate_text(members[k]), e.what(), std::current_exception());
      }
    });
  }

 private:
  const RunConfig& config_;
  GridSpec grid_;
  FieldCache cache_;
  std::ostream& log_;
  mutable std::mutex log_mutex_;
};

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::string text;
  for (const auto& l : lines) text += l + "\n";
  write_file_atomic(path, text);
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(line);
  return out;
}

ScalarField test_function(const GridSpec& grid, std::uint64_t seed) {
  FamilySpec spec;
  spec.amplitude = 1.0;
  spec.seed = seed;
  return family_density(grid, spec, 0.0);
}

int finish(const fs::path& path, const std::vector<VerificationReport>& checks, std::vector<std::string> lines,
           std::ostream& data) {
  int failed = 0;
  for (const auto& r : checks) {
    lines.push_back(json_line(r));
    if (!r.pass) ++failed;
  }
  write_lines(path, lines);
  std::vector<std::string> only;
  for (const auto& r : checks) only.push_back(json_line(r));
  if (!only.empty()) data << checks_table(only);
  return failed == 0 ? 0 : 3;
}

int cmd_solve(const Session& s, std::ostream& data) {
  const auto members = s.family();
  std::vector<std::string> lines(members.size());
  s.for_members(members, [&](std::size_t k) {
    const auto& m = members[k];
    const MASolution sol = s.solve(m.problem);
    const FunctionalReport rep =
        functional_report(m.problem, sol, s.config().family.params, s.config().lambda, s.config().mu);
    NamedValues values{{"residual", sol.residual}, {"osc_phi", sol.phi.max() - sol.phi.min()}};
    for (const auto& e : rep.entries()) values.push_back(e);
    lines[k] = json_line("solution", s.coordinates(m), values);
  });
  write_lines(fs::path(s.config().out) / "solve.jsonl", lines);
  data << records_table(lines, "solution");
  return 0;
}

int cmd_green(const Session& s, std::ostream& data) {
  const auto members = s.family();
  std::vector<std::vector<std::string>> per(members.size());
  s.for_members(members, [&](std::size_t k) {
    const auto& m = members[k];
    const MASolution sol = s.solve(m.problem);
    const LaplacianOperator op(sol.metric);
    const auto sources = sample_sources(m.problem.F, s.config().sources, s.config().seed + k);
    for (const auto& g : s.greens(op, sources)) {
      const GreenBounds b = green_bounds(g, op, s.config().class_delta);
      NamedValues coords = s.coordinates(m);
      coords.emplace_back("source", static_cast<double>(g.source));
      per[k].push_back(json_line("green", coords,
                                 {{"l1", b.l1}, {"neg_inf", b.neg_inf}, {"lq", b.lq}, {"grad_ls", b.grad_ls},
                                  {"q", b.q}, {"s", b.s}, {"C_l", g.C_l}}));
    }
  });
  std::vector<std::string> lines;
  for (auto& v : per) lines.insert(lines.end(), v.begin(), v.end());
  write_lines(fs::path(s.config().out) / "green.jsonl", lines);
  data << records_table(lines, "green");
  return 0;
}

int cmd_verify(const Session& s, std::ostream& data) {
  const RunConfig& c = s.config();
  const auto members = s.family();
  std::vector<std::vector<VerificationReport>> per(members.size());
  std::vector<std::vector<std::string>> notes(members.size());
  std::vector<std::optional<GreenBounds>> worst(members.size());

  s.for_members(members, [&](std::size_t k) {
    const auto& m = members[k];
    auto& out = per[k];
    auto tag = [&](VerificationReport r) {
      r.coordinates = s.coordinates(m);
      out.push_back(std::move(r));
    };
    const MASolution sol = s.solve(m.problem);
    const LaplacianOperator op(sol.metric);
    const ScalarField u = test_function(s.grid(), c.seed + 1000 + k);
    auto sources = sample_sources(m.problem.F, c.sources, c.seed + k);
    for (std::size_t x : {u.argmax(), u.argmin()})
      if (std::find(sources.begin(), sources.end(), x) == sources.end()) sources.push_back(x);
    const auto greens = s.greens(op, sources);

    for (const auto& g : greens) {
      tag(check_theorem1(g, op));
      for (double beta : c.betas) tag(check_gradient_identity(g, op, beta, c.gradient_identity_tol));
      tag(to_report(check_degiorgi_green(g, op, m.problem.background, c.degiorgi_p)));
    }
    const double osc_u = u.max() - u.min();
    VerificationReport rep = VerificationReport::upper("representation", representation_check(op, greens, u),
                                                       10.0 * c.solver.green_tol * osc_u, 0.0);
    rep.quantities = {{"osc_u", osc_u}, {"sources", static_cast<double>(greens.size())}};
    tag(rep);
    tag(check_sobolev_morrey(greens, op, u, c.sobolev_p));
    if (m.measured.fixed_class) tag(check_chengli_corollary(sol, m.problem.background));
    if (m.measured.m_prime) {
      tag(check_theorem2(greens, op, true, c.class_delta));
      GreenBounds w;
      for (const auto& g : greens) {
        const GreenBounds b = green_bounds(g, op, c.class_delta);
        w.l1 = std::max(w.l1, b.l1);
        w.neg_inf = std::max(w.neg_inf, b.neg_inf);
        w.lq = std::max(w.lq, b.lq);
        w.grad_ls = std::max(w.grad_ls, b.grad_ls);
      }
      worst[k] = w;
    } else {
      notes[k].push_back(json_line("outside_class", s.coordinates(m),
                                   {{"exp_moment", m.measured.exp_moment},
                                    {"sup_exp_neg_F", m.measured.sup_exp_neg_F}}));
      s.say(s.coordinate_text(m) + " is outside the class; uniform bounds skipped");
    }
  });

  std::vector<VerificationReport> checks;
  std::vector<std::string> lines;
  for (std::size_t k = 0; k < members.size(); ++k) {
    checks.insert(checks.end(), per[k].begin(), per[k].end());
    lines.insert(lines.end(), notes[k].begin(), notes[k].end());
  }
  std::vector<double> l1, ni, lq, gs;
  for (const auto& w : worst) {
    if (!w) continue;
    l1.push_back(w->l1);
    ni.push_back(w->neg_inf);
    lq.push_back(w->lq);
    gs.push_back(w->grad_ls);
  }
  if (l1.size() >= 2) {
    checks.push_back(check_uniformity("green_l1", l1, c.uniformity_factor));
    checks.push_back(check_uniformity("green_neg_inf", ni, c.uniformity_factor));
    checks.push_back(check_uniformity("green_lq", lq, c.uniformity_factor));
    checks.push_back(check_uniformity("green_grad_ls", gs, c.uniformity_factor));
  }
  return finish(fs::path(c.out) / "verify.jsonl", checks, lines, data);
}

int cmd_sweep(const Session& s, std::ostream& data) {
  const RunConfig& c = s.config();
  const auto members = s.family();
  const double p = c.family.hold_budget_p > 0.0 ? c.family.hold_budget_p : c.family.params.p;
  std::vector<SweepSample> samples(members.size());
  std::vector<std::string> lines(members.size());
  s.for_members(members, [&](std::size_t k) {
    const auto& m = members[k];
    const MASolution sol = s.solve(m.problem);
    const FunctionalReport rep = functional_report(m.problem, sol, c.family.params, c.lambda, c.mu);
    const double budget = gradient_lp_norm(m.problem.F, m.problem.background, p);
    samples[k] = {s.coordinates(m), budget, rep.sup_H, rep.sup_Q, rep.sup_S};
    lines[k] = json_line("sweep_member", s.coordinates(m),
                         {{"budget_p", p}, {"budget", budget}, {"sup_H", rep.sup_H}, {"sup_Q", rep.sup_Q},
                          {"sup_S", rep.sup_S}, {"sup_exp_neg_F", rep.sup_exp_neg_F}});
  });

  std::vector<VerificationReport> checks;
  try {
    checks = check_apriori_sweeps(samples, c.uniformity_factor, c.budget_drift);
  } catch (const BudgetDrift& e) {
    double lo = samples.front().budget, hi = lo;
    for (const auto& x : samples) {
      lo = std::min(lo, x.budget);
      hi = std::max(hi, x.budget);
    }
    VerificationReport r = VerificationReport::upper("budget_drift", (hi - lo) / hi, c.budget_drift, 0.0);
    r.quantities = {{"min", lo}, {"max", hi}};
    r.note = e.what();
    checks.push_back(r);
    s.say(e.what());
  }
  std::vector<double> deltas, H;
  for (std::size_t k = 0; k < members.size(); ++k) {
    if (members[k].delta > 0.0 && samples[k].sup_H > 0.0) {
      deltas.push_back(members[k].delta);
      H.push_back(samples[k].sup_H);
    }
  }
  if (deltas.size() >= 2 && deltas.size() == members.size()) {
    const PowerFit f = fit_power_law(deltas, H);
    lines.push_back(json_line("sweep_fit", {{"budget_p", p}},
                              {{"H_slope", f.slope}, {"blowup_exponent", -f.slope}, {"r2", f.r2}}));
  }
  return finish(fs::path(c.out) / "sweep.jsonl", checks, lines, data);
}

int cmd_examples(const Session& s, std::ostream& data) {
  const RunConfig& c = s.config();
  std::vector<SharpnessSummary> runs(c.examples.size());
  parallel_for(runs.size(), c.workers, [&](std::size_t k) {
    const auto& e = c.examples[k];
    runs[k] = run_sharpness(e.a, e.n, e.p, c.example_deltas);
  });
  const std::string csv = sharpness_csv(runs);
  write_file_atomic(fs::path(c.out) / "examples.csv", csv);
  write_file_atomic(fs::path(c.out) / "examples-fit.json", sharpness_fit_json(runs));
  data << csv;
  return 0;
}

int cmd_report(const Session& s, std::ostream& data) {
  const fs::path dir(s.config().out);
  std::vector<fs::path> files;
  if (fs::exists(dir))
    for (const auto& e : fs::directory_iterator(dir))
      if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<std::string> lines;
  for (const auto& f : files) {
    auto part = read_lines(f);
    lines.insert(lines.end(), part.begin(), part.end());
  }
  if (lines.empty()) throw ConfigInvalid("report: no .jsonl files in " + dir.string());
  const std::string table = checks_table(lines);
  write_file_atomic(dir / "checks.csv", table);
  for (const auto& kind : record_kinds(lines)) {
    const std::string t = records_table(lines, kind);
    if (!t.empty()) write_file_atomic(dir / (kind + ".csv"), t);
  }
  data << table;
  const int failed = failed_checks(lines);
  return failed == 0 ? 0 : 3;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"solve-ma", "green", "verify", "sweep", "examples", "report"};
  return names;
}

int run(const std::string& subcommand, const RunConfig& config, std::ostream& data, std::ostream& log) {
  config.validate();
  const auto& names = subcommands();
  if (std::find(names.begin(), names.end(), subcommand) == names.end())
    throw ConfigInvalid("unknown subcommand '" + subcommand + "'");
  fs::create_directories(config.out);
  const Session session(config, log);
  session.say(subcommand + " n=" + std::to_string(config.n) + " m=" + std::to_string(config.m) +
              " config=" + hex64(config_hash(config)));
  if (subcommand == "solve-ma") return cmd_solve(session, data);
  if (subcommand == "green") return cmd_green(session, data);
  if (subcommand == "verify") return cmd_verify(session, data);
  if (subcommand == "sweep") return cmd_sweep(session, data);
  if (subcommand == "examples") return cmd_examples(session, data);
  return cmd_report(session, data);
}

}  // namespace kgl
