#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "mrtc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tensor completion from partial and coarse observations"};
  std::string config_path;
  long long seed_override = -1;
  bool quiet = false;
  app.add_option("--config", config_path, "experiment config file (key=value lines)")->required();
  app.add_option("--seed", seed_override, "override the config seed");
  app.add_flag("--quiet", quiet, "suppress summary output");
  CLI11_PARSE(app, argc, argv);

  try {
    mrtc::ExperimentConfig cfg = mrtc::load_experiment_config(config_path);
    if (seed_override >= 0) cfg.solver.seed = static_cast<std::uint64_t>(seed_override);
    if (quiet) cfg.quiet = true;
    return mrtc::run_experiment(cfg);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
