#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "ddsim/config.hpp"
#include "ddsim/run.hpp"

namespace {

struct CliArgs {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 1;
  bool no_plot = false;
};

void add_common_options(CLI::App* sub, CliArgs& args) {
  sub->add_option("--config", args.config_path, "run configuration file")
      ->required();
  sub->add_option("--seed", args.seed, "master seed (wins over the config)");
  sub->add_option("--threads", args.threads,
                  "worker threads (default: DDSIM_THREADS or 1)")
      ->envname("DDSIM_THREADS")
      ->check(CLI::PositiveNumber);
  sub->add_flag("--no-plot", args.no_plot, "skip the SVG output");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamical-decoupling pulse sequence simulator"};
  app.require_subcommand(1);

  CliArgs args;
  CLI::Option* seed_opts[5];
  const char* commands[5] = {"fidelity-map", "diff-map", "spectroscopy",
                             "zstats", "unit-check"};
  const char* descriptions[5] = {
      "survival-probability map over detuning and amplitude errors",
      "pointwise difference between two protocol fidelity maps",
      "averaged population signal vs DD frequency",
      "|Z|^2 statistics of a phase protocol",
      "pulse and unit error parameters of one faulty unit"};
  for (int k = 0; k < 5; ++k) {
    CLI::App* sub = app.add_subcommand(commands[k], descriptions[k]);
    add_common_options(sub, args);
    seed_opts[k] = sub->get_option("--seed");
  }

  CLI11_PARSE(app, argc, argv);

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  for (int k = 0; k < 5; ++k)
    if (command == commands[k]) args.seed_given = seed_opts[k]->count() > 0;

  try {
    const ddsim::RunConfig config =
        ddsim::load_config_file(args.config_path, command);
    ddsim::RunOverrides overrides;
    if (args.seed_given) overrides.seed = args.seed;
    overrides.threads = args.threads;
    overrides.plot = !args.no_plot;
    const ddsim::RunPaths paths = ddsim::execute_run(config, overrides);
    std::cout << "wrote " << paths.csv << '\n';
    if (!paths.svg.empty()) std::cout << "wrote " << paths.svg << '\n';
    std::cout << "wrote " << paths.meta << '\n';
    return 0;
  } catch (const ddsim::ConfigError& ex) {
    for (const auto& e : ex.errors) std::cerr << "error: " << e << '\n';
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
}
