#pragma once

#include <random>
#include <vector>

#include "simcr/geometry.hpp"
#include "simcr/scenario.hpp"
#include "simcr/sim_stack.hpp"
#include "simcr/types.hpp"

namespace simcr {

// One mini-batch of angular samples: steering matrices per subcarrier and the
// projections of the target beamformers onto them. q[i] = A[i]^T f_hat[i].
struct AngularBatch {
  std::vector<Direction> directions;  // N_g
  std::vector<CMat> A;                // [I], N x N_g
  std::vector<CVec> q;                // [I], N_g
};

// az uniform on [-pi, pi); el uniform on [0, pi] or cosine-weighted.
std::vector<Direction> sample_directions(int n, ElSampling mode,
                                         std::mt19937_64& rng);

// Fixed evaluation grid: az -180..180 deg and el 0..180 deg at 2 deg steps
// (181 x 91 points, az-major).
std::vector<Direction> evaluation_grid();

// Steers `dirs` on every subcarrier and projects the targets.
AngularBatch make_batch(const std::vector<Direction>& dirs,
                        const std::vector<CVec>& f_hat,
                        const ScenarioConfig& cfg);

// b = A_grid^T f.
CVec beampattern(const CMat& A_grid, const CVec& f);

// (1/I) sum_i ||b[i] - q[i]||^2 with b[i] from the stack under `phi`.
double batch_loss(const SimStack& stack, const RMat& phi,
                  const AngularBatch& batch);

// Analytic d||b[i]-q[i]||^2 / d phi, one row per layer. Uses the layer
// recursions: u_l = Lmat[l]^H A[i]^* resid, grad(l,n) = 2 Im{e^{-j phi_ln}
// conj(r_l[n]) u_l[n]}.
RMat layer_gradients(const SimStack& stack, const RMat& phi,
                     const AngularBatch& batch, int i);

// Maps an angle to (-pi, pi].
double wrap_angle(double x);

struct TrainState {
  long t = 0;
  RMat m;  // L x N first moments
  RMat v;  // L x N second moments, entrywise >= 0
};

// Bias-corrected Adam update of `phi` in place; wraps every phase. `t`
// increments by exactly 1.
void adam_step(TrainState& state, RMat& phi, const RMat& mean_grad,
               const ScenarioConfig& cfg);

struct EpochStats {
  double mean_grad_norm = 0.0;  // Frobenius norm of the batch-mean gradient,
                                // averaged over the epoch's batches
  double bp_error = 0.0;        // normalized beampattern error, eval grid
  double mean_loss = 0.0;       // batch loss averaged over the epoch
};

struct TrainResult {
  RMat phi;
  std::vector<EpochStats> history;  // one entry per epoch
  double initial_bp_error = 0.0;    // eval-grid error before any update
};

// Mean over subcarriers of ||b - q||^2 / ||q||^2 on the evaluation grid.
// Subcarriers whose target projection is identically zero are skipped.
double normalized_bp_error(const SimStack& stack, const RMat& phi,
                           const std::vector<CVec>& f_hat,
                           const ScenarioConfig& cfg);

// Mini-batch Adam over N_e epochs x N_b batches of N_g random directions.
// Deterministic for a fixed scenario seed (stream "train"); per-subcarrier
// gradients run in parallel over `jobs` threads with a fixed reduction order.
// Throws NumericalError if the loss turns non-finite.
TrainResult train(const SimStack& stack, const std::vector<CVec>& f_hat,
                  const ScenarioConfig& cfg, int jobs = 1);

}  // namespace simcr
