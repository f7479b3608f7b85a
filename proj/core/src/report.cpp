#include "kgl/report.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

#include "kgl/errors.hpp"

namespace kgl {
namespace {

using nlohmann::ordered_json;

ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

ordered_json object(const NamedValues& values) {
  ordered_json o = ordered_json::object();
  for (const auto& [k, v] : values) o[k] = number(v);
  return o;
}

double as_number(const ordered_json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    return std::numeric_limits<double>::quiet_NaN();
  }
  if (j.is_boolean()) return j.get<bool>() ? 1.0 : 0.0;
  return std::numeric_limits<double>::quiet_NaN();
}

ordered_json parse(const std::string& line) {
  try {
    return ordered_json::parse(line);
  } catch (const ordered_json::exception& e) {
    throw Error(std::string("report: malformed record: ") + e.what());
  }
}

void add_column(std::vector<std::string>& cols, const std::string& name) {
  if (std::find(cols.begin(), cols.end(), name) == cols.end()) cols.push_back(name);
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string json_line(const VerificationReport& r) {
  ordered_json j;
  j["kind"] = "check";
  j["check"] = r.check;
  j["coordinates"] = object(r.coordinates);
  j["value"] = number(r.value);
  j["bound"] = number(r.bound);
  j["lower_bound"] = r.lower_bound;
  j["margin"] = number(r.margin);
  j["tolerance"] = number(r.tolerance);
  j["pass"] = r.pass;
  j["quantities"] = object(r.quantities);
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump();
}

std::string json_line(const std::string& kind, const NamedValues& coordinates, const NamedValues& values) {
  ordered_json j;
  j["kind"] = kind;
  j["coordinates"] = object(coordinates);
  j["values"] = object(values);
  return j.dump();
}

std::string sharpness_csv(const std::vector<SharpnessSummary>& runs) {
  std::ostringstream out;
  out << "a,n,p,delta,I_p,sup_grad,trace_at_delta,grad_slope,trace_slope\n";
  for (const auto& run : runs)
    for (const auto& r : run.rows)
      out << format_number(r.a) << ',' << r.n << ',' << format_number(r.p) << ',' << format_number(r.delta) << ','
          << format_number(r.budget) << ',' << format_number(r.sup_grad) << ',' << format_number(r.trace) << ','
          << format_number(run.grad_fit.slope) << ',' << format_number(run.trace_fit.slope) << '\n';
  return out.str();
}

std::string sharpness_fit_json(const std::vector<SharpnessSummary>& runs) {
  ordered_json arr = ordered_json::array();
  for (const auto& run : runs) {
    if (run.rows.empty()) continue;
    const auto& r0 = run.rows.front();
    ordered_json j;
    j["a"] = r0.a;
    j["n"] = r0.n;
    j["p"] = r0.p;
    j["zeta"] = number(run.zeta);
    j["budget_limit"] = number(run.budget_limit);
    j["budget_variation"] = number(run.budget_variation);
    j["grad_slope"] = number(run.grad_fit.slope);
    j["grad_r2"] = number(run.grad_fit.r2);
    j["trace_slope"] = number(run.trace_fit.slope);
    j["trace_r2"] = number(run.trace_fit.r2);
    arr.push_back(j);
  }
  return arr.dump(2) + "\n";
}

std::string checks_table(const std::vector<std::string>& lines) {
  struct Row {
    int count = 0, passed = 0;
    double min_margin = std::numeric_limits<double>::infinity();
  };
  std::vector<std::string> order;
  std::map<std::string, Row> rows;
  for (const auto& line : lines) {
    const auto j = parse(line);
    if (j.value("kind", std::string()) != "check") continue;
    const auto name = j.value("check", std::string());
    if (!rows.count(name)) order.push_back(name);
    Row& r = rows[name];
    ++r.count;
    if (j.value("pass", false)) ++r.passed;
    r.min_margin = std::min(r.min_margin, as_number(j["margin"]));
  }
  std::ostringstream out;
  out << "check,count,passed,failed,min_margin\n";
  for (const auto& name : order) {
    const Row& r = rows[name];
    out << name << ',' << r.count << ',' << r.passed << ',' << r.count - r.passed << ','
        << format_number(r.min_margin) << '\n';
  }
  return out.str();
}

int failed_checks(const std::vector<std::string>& lines) {
  int failed = 0;
  for (const auto& line : lines) {
    const auto j = parse(line);
    if (j.value("kind", std::string()) == "check" && !j.value("pass", false)) ++failed;
  }
  return failed;
}

std::vector<std::string> record_kinds(const std::vector<std::string>& lines) {
  std::vector<std::string> kinds;
  for (const auto& line : lines) add_column(kinds, parse(line).value("kind", std::string()));
  return kinds;
}

std::string records_table(const std::vector<std::string>& lines, const std::string& kind) {
  std::vector<ordered_json> recs;
  std::vector<std::string> coords, values;
  for (const auto& line : lines) {
    auto j = parse(line);
    if (j.value("kind", std::string()) != kind) continue;
    if (kind == "check") {
      ordered_json v;
      for (const char* key : {"value", "bound", "margin", "tolerance", "pass"}) v[key] = j[key];
      for (auto& [k, x] : j["quantities"].items()) v[k] = x;
      j["values"] = v;
    }
    for (auto& [k, x] : j["coordinates"].items()) add_column(coords, k);
    for (auto& [k, x] : j["values"].items()) add_column(values, k);
    recs.push_back(std::move(j));
  }
  if (recs.empty()) return {};
  std::ostringstream out;
  bool first = true;
  auto sep = [&] {
    if (!first) out << ',';
    first = false;
  };
  if (kind == "check") {
    sep();
    out << "check";
  }
  for (const auto& c : coords) {
    sep();
    out << c;
  }
  for (const auto& v : values) {
    sep();
    out << v;
  }
  out << '\n';
  for (const auto& j : recs) {
    first = true;
    if (kind == "check") {
      sep();
      out << j.value("check", std::string());
    }
    for (const auto& c : coords) {
      sep();
      if (j["coordinates"].contains(c)) out << format_number(as_number(j["coordinates"][c]));
    }
    for (const auto& v : values) {
      sep();
      if (j["values"].contains(v)) out << format_number(as_number(j["values"][v]));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace kgl
