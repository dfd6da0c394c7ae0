#pragma once

#include <array>
#include <random>
#include <string>
#include <vector>

#include "simcr/channels.hpp"
#include "simcr/fisher.hpp"
#include "simcr/scenario.hpp"
#include "simcr/types.hpp"

namespace simcr {

// Per-subcarrier protection budget derived from the primary-user links.
// R[i] is the interference quadratic form (transmit power folded in), S2[i]
// the received primary signal power, eps[i] the interference headroom that
// keeps the primary rate at the kappa fraction of its clean value.
struct InterferenceBudget {
  std::vector<CMat> R;
  std::vector<double> S2;
  std::vector<double> sinr_bar;
  std::vector<double> R_rate;
  std::vector<double> eps;
  std::vector<double> delta;  // resolved per-subcarrier norm caps
  double sigma_v2 = 0.0;
};

// Throws InfeasibleError (naming the 1-based subcarrier) when eps < 0;
// eps == 0 (kappa == 1) is legal and downgrades that subcarrier to a zero
// beamformer downstream. kappa == 1 produces R_rate = sinr_bar and eps = 0
// algebraically, with no rounding residue.
InterferenceBudget interference_budget(const ChannelSet& channels,
                                       const ScenarioConfig& cfg);

// Hermitian objective matrix of one subcarrier for the current direction
// vectors: sample mean of (2/sigma^2) * sum_j conj(Ct d_j) (Ct d_j)^T.
CMat assemble_quadratic(const SampleCache& cache,
                        const std::array<Vec5, 3>& d, int i,
                        double p_sb_scale = 1.0);

struct InnerTracePoint {
  char phase;    // 'b' bracket doubling, 'm' bisection midpoint
  int iter;      // 1-based within its phase
  double mu;
  double g;      // v(mu)^H R v(mu)
  double ratio;  // g / (eps/delta), 0 when the budget is zero
};

struct InnerResult {
  CVec f;
  int case_id = 0;     // 1 zero-response, 2 unconstrained top, 3 dual search
  double mu = 0.0;     // final multiplier (case 3)
  double g = 0.0;      // final interference quadratic of the unit vector
  int doublings = 0;
  int bisections = 0;
  bool safeguarded = false;  // degenerate-crossing subspace fix applied
  std::vector<InnerTracePoint> trace;
};

// Maximizes f^H A f subject to f^H R f <= eps, ||f||^2 <= delta.
// Case 1: top of A nonpositive -> zero vector. Case 2: principal eigenvector
// already feasible -> sqrt(delta) * u. Case 3: bisection over mu on
// g(mu) = v(mu)^H R v(mu), v(mu) the principal eigenvector of A - mu*R,
// bracketing by doubling mu_u from 1 (max 60), stopping at
// |g - eps/delta| < xi_tol (max 200 midpoints). A degenerate eigenvalue
// crossing falls back to the two-eigenvector subspace solution, else the
// feasible-side endpoint. xi_tol is absolute in the units of g.
// Global optimality of the Case-3 point needs A PSD so the norm-cap
// multiplier lambda_max(A - mu*R) stays nonnegative; assembled objective
// matrices are always PSD sums of outer products. For an indefinite A the
// routine still returns the both-constraints-active KKT point.
InnerResult inner_solve(const CMat& A, const CMat& R, double eps, double delta,
                        double xi_tol);

// Closed-form outer step: d_j = inv(J_B) e_j for j = 1..3.
std::array<Vec5, 3> direction_solve(const Mat5& J_B);

// Variational objective sum_j (-d_j^T J_B d_j + 2 d_j^T e_j); equals the
// position CRB at d_j = inv(J_B) e_j.
double maxmin_objective(const std::array<Vec5, 3>& d, const Mat5& J_B);

struct AlternateResult {
  std::vector<CVec> f;
  std::array<Vec5, 3> d;
  std::vector<double> objective;  // per outer iteration
  std::vector<double> bcrb;       // per outer iteration
  BfimParts fim;                  // at the returned iterate
  int iterations = 0;
  bool converged = false;
  std::vector<int> zero_subcarriers;      // eps == 0 downgrades (0-based)
  std::vector<InnerResult> last_inner;    // final iteration, per subcarrier
  std::vector<std::string> warnings;      // objective dips beyond 1e-9 rel
};

// Alternating optimization: directions start at the coordinate axes, each
// iteration solves every subcarrier's quadratic problem and refreshes the
// directions from the Bayesian information matrix. Continues while BOTH the
// relative objective change exceeds eps_tol AND the direction change exceeds
// tau_tol, up to max_ao_iters. The per-subcarrier bisection band is
// xi_rel * eps[i]/delta[i].
AlternateResult alternate(const SampleCache& cache,
                          const InterferenceBudget& budget,
                          const ScenarioConfig& cfg, int jobs = 1);

// Draws a vector satisfying both constraints with margin: unit-scaled
// complex-normal direction, norm sqrt(delta), shrunk if the interference cap
// binds.
CVec random_feasible(const CMat& R, double eps, double delta,
                     std::mt19937_64& rng);

struct SweepResult {
  std::vector<int> order;            // visit order (0-based subcarriers)
  std::vector<double> bcrb_after;    // CRB after each visit
  std::vector<InnerResult> inner;    // per visit
  std::vector<CVec> f;               // final set
};

// Fixed-direction per-subcarrier refinement: starting from f_init, visits
// subcarriers in `order`, replaces each beamformer by its solved optimum, and
// records the CRB after every replacement.
SweepResult subcarrier_sweep(const SampleCache& cache,
                             const InterferenceBudget& budget,
                             const std::array<Vec5, 3>& d,
                             const std::vector<CVec>& f_init,
                             const std::vector<int>& order,
                             const ScenarioConfig& cfg);

}  // namespace simcr
