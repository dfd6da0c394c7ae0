#pragma once

#include <optional>
#include <string>
#include <vector>

#include "simcr/scenario.hpp"
#include "simcr/types.hpp"

namespace simcr {

// Multilayer metasurface: per-subcarrier inter-layer coupling matrices, feed
// vectors, and the current phase configuration (L x N, radians in (-pi, pi]).
// Layers are identical, coaxial, centered grids, so every inter-layer
// coupling matrix of a stack is the same for a given subcarrier.
struct SimStack {
  int L = 0;
  int N_h = 0;
  int N_v = 0;
  int I = 0;
  std::vector<std::vector<CMat>> W;  // W[l][i], l=0..L-2 couples layer l+1 -> l+2
  std::vector<CVec> w_feed;          // [I], illumination of layer 1
  RMat phi;                          // L x N phases

  int n_atoms() const { return N_h * N_v; }
};

// Free-space spherical-wave coupling between two patches at distance `dist`
// (axial separation d_s, patch area A_s) at frequency `freq`:
// (A_s*d_s/dist^2) * (1/(2*pi*dist) - j*freq/c) * e^{j*2*pi*dist*freq/c}.
cplx coupling_coefficient(double dist, double freq, double A_s, double d_s);

// Builds coupling matrices and feed vectors for every subcarrier; the feed is
// a point source at distance d_s behind the center of layer 1 using the same
// coupling kernel. Phases initialize uniform in (-pi, pi] from the scenario
// seed (stream "phases").
SimStack build_sim(const ScenarioConfig& cfg);

// As build_sim, but consults the binary stack cache under `cache_dir` (keyed
// by the propagation-layout hash) before computing; writes on miss.
SimStack build_sim_cached(const ScenarioConfig& cfg,
                          const std::string& cache_dir);

// Hash of every quantity the W tensors and feeds depend on.
std::uint64_t stack_layout_hash(const ScenarioConfig& cfg);

// End-to-end response f[i] = Phi_L W_L ... Phi_2 W_2 Phi_1 w[i] for the given
// phase matrix (overrides stack.phi).
CVec end_to_end(const SimStack& stack, const RMat& phi, int i);

// Layer-wise forward/backward state for subcarrier i:
//   r[0] = w[i],  r[l] = W[l-1][i] * (Phi_l . r[l-1]),
//   Lmat[L-1] = I, Lmat[l] = Lmat[l+1] * Phi_{l+2} * W[l][i],
// so Lmat[l] * (Phi_{l+1} . r[l]) = f[i] for every layer index l (0-based).
struct Recursion {
  std::vector<CVec> r;     // [L]
  std::vector<CMat> Lmat;  // [L]
  CVec f;
};
Recursion forward_backward(const SimStack& stack, const RMat& phi, int i);

// Versioned binary cache of the coupling tensors + feeds (phases excluded).
void save_stack_cache(const std::string& path, const SimStack& stack,
                      std::uint64_t layout_hash);
std::optional<SimStack> load_stack_cache(const std::string& path,
                                         std::uint64_t expected_hash);

}  // namespace simcr
