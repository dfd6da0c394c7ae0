#pragma once

#include <vector>

#include "simcr/geometry.hpp"
#include "simcr/scenario.hpp"
#include "simcr/types.hpp"

namespace simcr {

// Line-of-sight parameters of a surface-anchored link. rho is the
// frequency-flat magnitude (free space at the carrier wavelength), phi the
// gain phase, tau the propagation delay, dir the departure direction at the
// surface.
struct LosParams {
  double rho = 0.0;
  double phi = 0.0;
  double tau = 0.0;
  Direction dir;
};

// One single-bounce scatter path of a surface-anchored link.
struct ScatterPath {
  cplx alpha;      // composite gain (two segments + reflection coefficient)
  double tau;      // total delay
  Direction dir;   // departure direction toward the scatterer
};

// Surface <-> terminal vector channel: LoS plus scatter paths, materialized
// per subcarrier. Gains exclude transmit power (applied at use sites).
struct VectorChannel {
  LosParams los;
  std::vector<ScatterPath> paths;
  std::vector<CVec> h;  // [I], each length N
};

// PB <-> PU scalar channel.
struct ScalarChannel {
  cplx los_alpha;
  double los_tau = 0.0;
  std::vector<cplx> path_alpha;
  std::vector<double> path_tau;
  std::vector<cplx> h;  // [I]
};

struct ChannelSet {
  VectorChannel su_s;                  // nominal SU at the prior-region center
  std::vector<VectorChannel> pu_s;     // per PU
  std::vector<ScalarChannel> pu_pb;    // per PU
};

// Deterministic synthesis from the scenario seed: LoS geometry from the
// configured positions, scatterers uniform in a 1.5x-inflated bounding box of
// the deployment, reflection coefficients with |.| ~ U[0.2,0.8] and uniform
// phase. Identical config -> bit-identical channels.
ChannelSet synth_channels(const ScenarioConfig& cfg);

// Materializes one vector channel tap: alpha * e^{-j*zeta_i*tau} * a_i(dir).
CVec channel_tap(cplx alpha, double tau, const Direction& dir,
                 const ScenarioConfig& cfg, int i);

}  // namespace simcr
