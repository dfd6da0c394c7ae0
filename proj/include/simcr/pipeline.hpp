#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "simcr/scenario.hpp"

namespace simcr {

// Canonical stage order; `stages` selections execute in this order regardless
// of how they were listed.
extern const std::vector<std::string> kStageOrder;

struct RunOptions {
  ScenarioConfig cfg;
  std::string out_dir;
  std::vector<std::string> stages;  // empty => all
  int jobs = 1;
  std::string cache_dir;  // coupling-tensor cache location; empty disables
};

// Executes the requested stages (synth -> budget -> alternate -> train ->
// evaluate) into out_dir, reusing hash-checked upstream artifacts when a
// stage's producer was not requested, and writes manifest.json. Throws
// ConfigError for missing upstream artifacts (naming the stage to run),
// InfeasibleError / NumericalError from the underlying solvers.
void run_stages(const RunOptions& opts, std::ostream& log);

// Diagnostics for the validate subcommand: derived quantities, geometry
// checks, and a feasibility pre-check of the interference budget. Throws on
// the first violation; returns normally when everything passes.
void validate_report(const ScenarioConfig& cfg, std::ostream& os);

}  // namespace simcr
