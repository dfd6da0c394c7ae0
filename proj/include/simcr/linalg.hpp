#pragma once

#include "simcr/types.hpp"

namespace simcr {

struct EigenPair {
  double value;
  CVec vector;  // unit norm, deterministic phase (see principal_eigenpair)
};

// Averages away the anti-Hermitian part: returns (M + M^H)/2.
CMat hermitian_part(const CMat& M);

// Largest-eigenvalue pair of a Hermitian matrix.
//
// Determinism contract: the returned vector has unit norm and is rotated so
// that its largest-magnitude entry is real and nonnegative; entry ties pick
// the lowest index. Eigenvalue ties pick the lowest index in the solver's
// ascending ordering. Exactly diagonal inputs short-circuit to (max diagonal,
// coordinate vector) so canonical test matrices are reproduced bit-exactly.
// dim <= 64 uses a full decomposition; larger inputs use a shifted power
// iteration with a full-decomposition fallback if it stalls.
EigenPair principal_eigenpair(const CMat& M);

// Solves M x = b for symmetric positive definite M (Cholesky with symmetric
// Jacobi equilibration and one refinement step). Throws SingularityError with
// a condition estimate when the equilibrated matrix's smallest eigenvalue is
// at or below 1e-14 * dim, i.e. rank deficiency that no rescaling repairs.
RVec solve_spd(const RMat& M, const RVec& b);

}  // namespace simcr
