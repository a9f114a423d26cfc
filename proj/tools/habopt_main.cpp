#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "habopt/errors.hpp"
#include "habopt/experiments.hpp"

// Exit codes: 0 success, 2 invalid configuration, 3 solver failure.
int main(int argc, char** argv) {
  CLI::App app{"habitat-optimization toolkit: steady logistic-diffusive solver "
               "and resource-distribution optimizer"};
  app.require_subcommand(1);

  struct Args {
    std::string config;
    std::string out;
    std::int64_t seed = -1;
    int threads = 0;
  };
  Args args;

  for (const std::string& name : habopt::scenario_names()) {
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " scenario");
    sub->add_option("--config", args.config, "scenario config JSON")->required();
    sub->add_option("--out", args.out, "output directory (overrides the config)");
    sub->add_option("--seed", args.seed, "seed (overrides the config)");
    sub->add_option("--threads", args.threads, "worker threads (overrides the config)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  const std::string scenario = app.get_subcommands().front()->get_name();
  try {
    habopt::ScenarioConfig cfg = habopt::load_config(args.config, scenario);
    if (!args.out.empty()) cfg.out_dir = args.out;
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (args.threads > 0) cfg.threads = args.threads;
    habopt::run_scenario(cfg);
  } catch (const habopt::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
