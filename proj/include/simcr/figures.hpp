#pragma once

#include <string>
#include <vector>

#include "simcr/scenario.hpp"

namespace simcr {

extern const std::vector<std::string> kFigureIds;

// Runs the minimal pipeline for one figure dataset and writes
// <figure_id>.csv into out_dir; returns the CSV path. Unknown ids throw
// ConfigError listing the valid ones. Output is deterministic for a fixed
// scenario (byte-identical across reruns).
std::string write_figure(const std::string& figure_id,
                         const ScenarioConfig& cfg, const std::string& out_dir,
                         int jobs = 1, const std::string& cache_dir = "");

}  // namespace simcr
