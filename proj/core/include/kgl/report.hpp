#pragma once

// JSON-lines records and the CSV tables built from them.
//
// Every record is one JSON object per line with a "kind" key. Verification
// records carry kind "check"; everything else is a flat record with
// "coordinates" and "values" objects.

#include <string>
#include <vector>

#include "kgl/sharpness.hpp"
#include "kgl/verifier.hpp"

namespace kgl {

std::string json_line(const VerificationReport& report);
std::string json_line(const std::string& kind, const NamedValues& coordinates, const NamedValues& values);

/// Columns a, n, p, delta, I_p, sup_grad, trace_at_delta, grad_slope, trace_slope.
std::string sharpness_csv(const std::vector<SharpnessSummary>& runs);
/// One object per run with the fitted slopes, zeta and the delta -> 0 limit.
std::string sharpness_fit_json(const std::vector<SharpnessSummary>& runs);

/// check, count, passed, failed, min_margin over the "check" records.
std::string checks_table(const std::vector<std::string>& lines);
/// Wide table of all records of one kind: coordinate columns, then value
/// columns, in first-seen order. Empty string if the kind does not occur.
std::string records_table(const std::vector<std::string>& lines, const std::string& kind);
/// Number of "check" records with pass = false.
int failed_checks(const std::vector<std::string>& lines);
/// Distinct kinds in first-seen order.
std::vector<std::string> record_kinds(const std::vector<std::string>& lines);

/// Fixed-precision rendering used by every CSV (%.10g; inf and nan spelled out).
std::string format_number(double v);

}  // namespace kgl
