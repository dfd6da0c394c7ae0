#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "simcr/errors.hpp"
#include "simcr/figures.hpp"
#include "simcr/pipeline.hpp"
#include "simcr/scenario.hpp"

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  int jobs = 1;
  bool paper_scale = false;
  CLI::Option* seed_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_out) {
  cmd->add_option("--scenario", args.scenario_path,
                  "Scenario file (built-in desk defaults when omitted)")
      ->check(CLI::ExistingFile);
  if (with_out) {
    cmd->add_option("--out", args.out_dir, "Output directory")
        ->capture_default_str();
    args.seed_opt =
        cmd->add_option("--seed", args.seed, "Override the scenario RNG seed");
    cmd->add_option("--jobs", args.jobs, "Worker threads for per-subcarrier work")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  cmd->add_flag("--paper-scale", args.paper_scale,
                "Full-scale grid sizes (I=50, M_p=20000, N_e=200)");
}

simcr::ScenarioConfig resolve_config(const CommonArgs& args) {
  simcr::ScenarioConfig cfg = args.scenario_path.empty()
                                  ? simcr::default_scenario()
                                  : simcr::load_scenario(args.scenario_path);
  if (args.paper_scale) simcr::apply_paper_scale(cfg);
  if (args.seed_opt != nullptr && args.seed_opt->count() > 0) {
    cfg.rng_seed = args.seed;
  }
  return cfg;
}

std::string cache_dir_from_env() {
  const char* dir = std::getenv("SIMCR_CACHE_DIR");
  return dir != nullptr ? dir : "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Metasurface-aided spectrum-sharing localization experiments"};
  app.require_subcommand(1);

  CommonArgs run_args;
  std::vector<std::string> stages;
  CLI::App* run = app.add_subcommand(
      "run", "Run pipeline stages (synth, budget, alternate, train, evaluate)");
  add_common(run, run_args, true);
  run->add_option("--stages", stages,
                  "Comma-separated stage subset (default: all)")
      ->delimiter(',');

  CommonArgs fig_args;
  std::string figure_id;
  CLI::App* figure =
      app.add_subcommand("figure", "Write one figure dataset as CSV");
  figure->add_option("id", figure_id, "Figure identifier")->required();
  add_common(figure, fig_args, true);

  CommonArgs val_args;
  CLI::App* validate = app.add_subcommand(
      "validate", "Check a scenario file and print derived quantities");
  add_common(validate, val_args, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      simcr::RunOptions opts;
      opts.cfg = resolve_config(run_args);
      opts.out_dir = run_args.out_dir;
      opts.stages = stages;
      opts.jobs = run_args.jobs;
      opts.cache_dir = cache_dir_from_env();
      simcr::run_stages(opts, std::cout);
    } else if (figure->parsed()) {
      simcr::ScenarioConfig cfg = resolve_config(fig_args);
      std::string path = simcr::write_figure(
          figure_id, cfg, fig_args.out_dir, fig_args.jobs, cache_dir_from_env());
      std::cout << path << "\n";
    } else if (validate->parsed()) {
      simcr::ScenarioConfig cfg = resolve_config(val_args);
      simcr::validate_report(cfg, std::cout);
    }
  } catch (const simcr::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const simcr::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 3;
  } catch (const simcr::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
