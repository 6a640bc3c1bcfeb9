#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cfl.h"

int main(int argc, char** argv) {
  CLI::App app{"cfl: numerical laboratory for operator-encoded spaces and space-times"};
  app.require_subcommand(0, 1);

  std::string config, outdir = ".";
  uint64_t seed = 0;
  bool plot_data = false;
  app.add_option("--config", config, "TOML scenario configuration");
  app.add_option("--out", outdir, "output directory for artifacts");
  app.add_option("--seed", seed, "seed for all stochastic choices");
  app.add_flag("--plot-data", plot_data, "emit x/y plot-ready columns");

  const std::vector<std::string> scenarios = {
      "sphere", "plane",   "minkowski", "chiral",   "cone-measure", "spin-structure", "neck",
      "cone",   "cone-s1", "torus-s1",  "schwarzschild", "lattice", "verify-all"};
  for (const auto& name : scenarios)
    app.add_subcommand(name, "run the " + name + " scenario");
  auto* list_cmd = app.add_subcommand("list", "list available scenarios");

  CLI11_PARSE(app, argc, argv);

  if (list_cmd->parsed()) {
    char* catalog = cfl_list_scenarios();
    if (catalog) {
      std::fputs(catalog, stdout);
      cfl_string_free(catalog);
    }
    return 0;
  }

  for (const auto& name : scenarios) {
    if (app.get_subcommand(name)->parsed()) {
      int rc = cfl_run_scenario(name.c_str(), config.empty() ? nullptr : config.c_str(),
                                outdir.c_str(), seed, plot_data ? 1 : 0);
      std::fputs(cfl_last_error(), stdout);
      if (rc != 0) std::fprintf(stderr, "exit code %d\n", rc);
      return rc;
    }
  }

  std::fputs(app.help().c_str(), stdout);
  return 0;
}
