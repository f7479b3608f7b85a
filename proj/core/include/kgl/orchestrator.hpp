#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kgl/config.hpp"

namespace kgl {

const std::vector<std::string>& subcommands();

/// Runs one subcommand; artifacts go to config.out, the main table to `data`,
/// progress to `log`. Returns 0 when every recorded check passed and 3
/// otherwise. Errors of individual sweep members surface as JobFailed.
///
///   solve-ma  solve.jsonl       functionals per family member
///   green     green.jsonl       per-source Green quantities
///   verify    verify.jsonl      the full check battery
///   sweep     sweep.jsonl       a priori quantities across the family
///   examples  examples.csv      radial budgets and blowup fits (+ examples-fit.json)
///   report    checks.csv        aggregate of every *.jsonl in config.out, plus <kind>.csv
int run(const std::string& subcommand, const RunConfig& config, std::ostream& data, std::ostream& log);

}  // namespace kgl
