#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "simcr/beam.hpp"
#include "simcr/channels.hpp"
#include "simcr/trainer.hpp"
#include "simcr/types.hpp"

namespace simcr {

// Deterministic %.17g rendering (round-trip safe, locale independent); every
// number written into a CSV or JSON artifact goes through this.
std::string fmt_g17(double x);

// 16-hex-digit rendering of a scenario or layout hash.
std::string fmt_hash(std::uint64_t h);

// Binary channel-set artifact. Loaders return nullopt when the file does not
// exist and throw ConfigError when it exists but was produced by a different
// scenario (hash mismatch) or is malformed.
void save_channels(const std::string& path, const ChannelSet& set,
                   std::uint64_t scenario_hash);
std::optional<ChannelSet> load_channels(const std::string& path,
                                        std::uint64_t expected_hash);

// Human-readable per-subcarrier budget report (the quadratic forms R are
// cheap to recompute from channels and are not stored).
void save_budget(const std::string& path, const InterferenceBudget& budget,
                 std::uint64_t scenario_hash);

// Optimal beamformers + max-min directions + convergence traces.
struct TargetArtifact {
  std::vector<CVec> f;
  std::array<Vec5, 3> d{};
  std::vector<double> objective;
  std::vector<double> bcrb;
  int iterations = 0;
  bool converged = false;
  std::vector<int> zero_subcarriers;
};
void save_targets(const std::string& path, const AlternateResult& result,
                  std::uint64_t scenario_hash);
std::optional<TargetArtifact> load_targets(const std::string& path,
                                           std::uint64_t expected_hash);

// Trained phase configuration + per-epoch history.
struct PhasesArtifact {
  RMat phi;
  std::vector<EpochStats> history;
  double initial_bp_error = 0.0;
};
void save_phases(const std::string& path, const TrainResult& result,
                 std::uint64_t scenario_hash, std::uint64_t layout_hash);
std::optional<PhasesArtifact> load_phases(const std::string& path,
                                          std::uint64_t expected_hash,
                                          std::uint64_t expected_layout);

}  // namespace simcr
