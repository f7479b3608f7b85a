#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "kgl/config.hpp"
#include "kgl/errors.hpp"
#include "kgl/orchestrator.hpp"

namespace {

int exit_code(const kgl::Error& e) {
  if (dynamic_cast<const kgl::ConfigInvalid*>(&e)) return 2;
  if (dynamic_cast<const kgl::CacheCorrupt*>(&e)) return 4;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete Kahler geometry: Monge-Ampere solves, Green functions and bound checks"};
  std::string subcommand, config_path, out;
  int workers = 0;
  long long seed = -1;
  bool print_config = false;
  app.add_option("subcommand", subcommand, "solve-ma | green | verify | sweep | examples | report")
      ->check(CLI::IsMember(kgl::subcommands()));
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out, "output directory");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "random seed")->check(CLI::NonNegativeNumber);
  app.add_flag("--print-config", print_config, "print the effective config and exit");
  CLI11_PARSE(app, argc, argv);

  try {
    kgl::RunConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      std::stringstream text;
      text << in.rdbuf();
      config = kgl::parse_config(text.str());
    }
    if (!out.empty()) config.out = out;
    if (workers > 0) config.workers = workers;
    if (seed >= 0) {
      config.seed = static_cast<std::uint64_t>(seed);
      config.family.seed = config.seed;
    }
    config.validate();
    if (print_config) {
      std::cout << kgl::dump_config(config);
      return 0;
    }
    if (subcommand.empty()) {
      std::cerr << "kgl: a subcommand is required (see --help)\n";
      return 2;
    }
    return kgl::run(subcommand, config, std::cout, std::cerr);
  } catch (const kgl::Error& e) {
    std::cerr << "kgl: " << e.what() << '\n';
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "kgl: " << e.what() << '\n';
    return 1;
  }
}
