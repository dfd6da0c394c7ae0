#include "simcr/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "simcr/errors.hpp"

namespace simcr {

namespace {

void require_finite(const CMat& M, const char* who) {
  if (!M.allFinite()) {
    throw InvalidInputError(std::string(who) + ": non-finite entries");
  }
}

// Rotates v so its largest-magnitude entry (ties: lowest index) is real >= 0.
void canonicalize_phase(CVec& v) {
  Eigen::Index k = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double m = std::abs(v[i]);
    if (m > best) {
      best = m;
      k = i;
    }
  }
  if (best > 0.0) {
    cplx r = std::conj(v[k]) / best;
    v *= r;
    v[k] = cplx(std::abs(v[k]), 0.0);  // kill residual imaginary dust
  }
}

bool exactly_diagonal(const CMat& M) {
  for (Eigen::Index j = 0; j < M.cols(); ++j) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
      if (i != j && M(i, j) != cplx(0.0, 0.0)) return false;
    }
  }
  return true;
}

EigenPair dense_principal(const CMat& H) {
  Eigen::SelfAdjointEigenSolver<CMat> es(H);
  if (es.info() != Eigen::Success) {
    throw NumericalError("principal_eigenpair: eigensolver failed");
  }
  const RVec& vals = es.eigenvalues();  // ascending
  const Eigen::Index n = vals.size();
  double top = vals[n - 1];
  Eigen::Index k = n - 1;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (vals[i] == top) {  // lowest index among exact ties
      k = i;
      break;
    }
  }
  EigenPair out{vals[k], es.eigenvectors().col(k)};
  out.vector.normalize();
  canonicalize_phase(out.vector);
  return out;
}

}  // namespace

CMat hermitian_part(const CMat& M) { return 0.5 * (M + M.adjoint()); }

EigenPair principal_eigenpair(const CMat& M) {
  require_finite(M, "principal_eigenpair");
  if (M.rows() != M.cols() || M.rows() == 0) {
    throw InvalidInputError("principal_eigenpair: matrix must be square");
  }
  if (exactly_diagonal(M)) {
    Eigen::Index k = 0;
    double top = M(0, 0).real();
    for (Eigen::Index i = 1; i < M.rows(); ++i) {
      if (M(i, i).real() > top) {
        top = M(i, i).real();
        k = i;
      }
    }
    EigenPair out{top, CVec::Zero(M.rows())};
    out.vector[k] = cplx(1.0, 0.0);
    return out;
  }

  CMat H = hermitian_part(M);
  const Eigen::Index n = H.rows();
  if (n <= 64) return dense_principal(H);

  // Shifted power iteration: H + sigma*I is PSD-dominant at the top end, so
  // the iteration converges to the largest eigenvalue of H.
  double sigma = H.norm();
  CVec v = CVec::Ones(n) / std::sqrt(double(n));
  double lambda = 0.0;
  bool converged = false;
  for (int it = 0; it < 20000; ++it) {
    CVec w = H * v + sigma * v;
    double nw = w.norm();
    if (nw == 0.0) break;  // H = -sigma*I edge; fall back
    w /= nw;
    CVec Hw = H * w;
    lambda = w.dot(Hw).real();
    if ((Hw - lambda * w).norm() <= 1e-12 * (sigma + std::abs(lambda))) {
      v = w;
      converged = true;
      break;
    }
    v = w;
  }
  if (!converged) return dense_principal(H);  // stall safeguard
  canonicalize_phase(v);
  return EigenPair{lambda, v};
}

RVec solve_spd(const RMat& M, const RVec& b) {
  if (!M.allFinite() || !b.allFinite()) {
    throw InvalidInputError("solve_spd: non-finite entries");
  }
  if (M.rows() != M.cols() || M.rows() != b.size() || M.rows() == 0) {
    throw InvalidInputError("solve_spd: shape mismatch");
  }
  const Eigen::Index n = M.rows();
  RMat S = 0.5 * (M + M.transpose());

  // Symmetric Jacobi equilibration: units of the unknowns can differ by many
  // orders of magnitude, and scaling restores the correlation-level condition.
  // Singularity is judged on the scaled matrix so a benign unit disparity is
  // not mistaken for rank deficiency.
  RVec s(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(S(i, i) > 0.0)) {
      throw SingularityError("solve_spd: nonpositive diagonal entry",
                             std::numeric_limits<double>::infinity());
    }
    s[i] = 1.0 / std::sqrt(S(i, i));
  }
  RMat Se = s.asDiagonal() * S * s.asDiagonal();

  Eigen::SelfAdjointEigenSolver<RMat> es(Se, Eigen::EigenvaluesOnly);
  const RVec& ev = es.eigenvalues();
  double lo = ev[0], hi = ev[n - 1];
  if (!(lo > 1e-14 * double(n))) {  // trace(Se) == n by construction
    double cond = (lo > 0.0) ? hi / lo : std::numeric_limits<double>::infinity();
    throw SingularityError(
        "solve_spd: matrix is singular or near-singular (cond ~ " +
            std::to_string(cond) + ")",
        cond);
  }

  Eigen::LLT<RMat> llt(Se);
  if (llt.info() != Eigen::Success) {
    throw SingularityError("solve_spd: Cholesky failed", hi / lo);
  }
  RVec be = s.asDiagonal() * b;
  RVec xe = llt.solve(be);
  xe += llt.solve(be - Se * xe);  // one refinement step
  return s.asDiagonal() * xe;
}

}  // namespace simcr
