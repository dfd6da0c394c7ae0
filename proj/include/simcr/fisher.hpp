#pragma once

#include <vector>

#include "simcr/channels.hpp"
#include "simcr/scenario.hpp"
#include "simcr/types.hpp"

namespace simcr {

// One draw of the uncertain terminal state: position plus the gain
// magnitude/phase nuisance pair. State coordinate order everywhere is
// (p_x, p_y, p_z, rho, phi); channel-parameter order is (el, az, tau, rho, phi).
struct StateSample {
  Vec3 p;
  double rho = 0.0;
  double phi = 0.0;
};

// Uniform position draws over the prior cuboid; rho follows free space at the
// sampled distance, phi is uniform on [0, 2pi). Draws whose elevation falls
// within 1e-6 of the polar axis are rejected and redrawn (bounded retries).
std::vector<StateSample> draw_samples(const ScenarioConfig& cfg,
                                      std::uint64_t seed);

// Direct tap c = sqrt(P_sb)*rho*e^{j*phi}*e^{-j*zeta_i*tau}*a_i(dir) and its
// derivatives in the channel parameters, as the N x 5 matrix dc with columns
// (el, az, tau, rho, phi).
struct DerivativeBundle {
  CVec c;
  CMat dc;
};
DerivativeBundle tap_derivatives(const StateSample& s,
                                 const ScenarioConfig& cfg, int i,
                                 double p_sb);

// 5x5 chain-rule map T with rows indexed by state coordinates and columns by
// channel parameters: position rows carry the analytic (el, az, tau) spatial
// gradients, and the (rho, phi) block is the identity. Throws
// DegenerateGeometryError on the polar axis.
Mat5 state_jacobian(const StateSample& s, const ScenarioConfig& cfg);

// State-transformed derivative columns ctilde_u = sum_j T(u,j) * dc_j for one
// (sample, subcarrier) pair, as an N x 5 matrix.
CMat transformed_derivatives(const StateSample& s, const ScenarioConfig& cfg,
                             int i, double p_sb);

// Monte-Carlo sample set with (optionally) precomputed transformed
// derivatives for every (sample, subcarrier) pair. Materialization is skipped
// above a memory budget; accessors then recompute on the fly.
class SampleCache {
 public:
  SampleCache(std::vector<StateSample> samples, const ScenarioConfig& cfg,
              std::size_t max_bytes = 512ull << 20);

  const std::vector<StateSample>& samples() const { return samples_; }
  int count() const { return static_cast<int>(samples_.size()); }
  const ScenarioConfig& config() const { return cfg_; }
  bool materialized() const { return materialized_; }

  // Writes the N x 5 transformed-derivative matrix of (sample m, subcarrier i)
  // into `out` (resized as needed).
  void ctilde_into(int m, int i, CMat& out) const;

 private:
  std::vector<StateSample> samples_;
  ScenarioConfig cfg_;
  bool materialized_ = false;
  std::vector<CMat> ct_;  // [m * I + i]
};

struct BfimParts {
  Mat5 J_D = Mat5::Zero();  // data term
  Mat5 J_P = Mat5::Zero();  // prior term (regularizer)
  Mat5 J_B = Mat5::Zero();  // sum
};

// Bayesian information matrix for the beamformer set f (one vector per
// subcarrier); expectation over the cache's samples. p_sb_scale rescales the
// transmit power relative to the scenario's P_sb (the data term is linear in
// it).
BfimParts bayesian_fim(const std::vector<CVec>& f, const SampleCache& cache,
                       double p_sb_scale = 1.0);

// Position-block CRB: trace of the top-left 3x3 block of inv(J_B).
double position_crb(const Mat5& J_B);

// Closed-form floor 9 / trace(position block of J_B); never exceeds the CRB
// for a positive definite J_B.
double trace_lower_bound(const Mat5& J_B);

}  // namespace simcr
