#include "simcr/trainer.hpp"

#include <cmath>
#include <string>

#include "simcr/errors.hpp"
#include "simcr/parallel.hpp"
#include "simcr/rng.hpp"

namespace simcr {

std::vector<Direction> sample_directions(int n, ElSampling mode,
                                         std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::vector<Direction> dirs(n);
  for (int g = 0; g < n; ++g) {
    double az = -kPi + 2.0 * kPi * u01(rng);
    double el;
    if (mode == ElSampling::kCosine) {
      el = std::acos(1.0 - 2.0 * u01(rng));
    } else {
      el = kPi * u01(rng);
    }
    dirs[g] = Direction{el, az};
  }
  return dirs;
}

std::vector<Direction> evaluation_grid() {
  std::vector<Direction> dirs;
  dirs.reserve(181 * 91);
  for (int a = 0; a < 181; ++a) {
    double az = (-180.0 + 2.0 * a) * kPi / 180.0;
    for (int e = 0; e < 91; ++e) {
      double el = 2.0 * e * kPi / 180.0;
      dirs.push_back(Direction{el, az});
    }
  }
  return dirs;
}

AngularBatch make_batch(const std::vector<Direction>& dirs,
                        const std::vector<CVec>& f_hat,
                        const ScenarioConfig& cfg) {
  const int N = cfg.n_atoms();
  const int N_g = static_cast<int>(dirs.size());
  AngularBatch batch;
  batch.directions = dirs;
  batch.A.resize(cfg.I);
  batch.q.resize(cfg.I);
  for (int i = 0; i < cfg.I; ++i) {
    CMat A(N, N_g);
    double lam = cfg.wavelength(i);
    for (int g = 0; g < N_g; ++g) {
      A.col(g) = steering_vector(dirs[g], lam, cfg.d, cfg.N_h, cfg.N_v);
    }
    batch.q[i] = A.transpose() * f_hat.at(i);
    batch.A[i] = std::move(A);
  }
  return batch;
}

CVec beampattern(const CMat& A_grid, const CVec& f) {
  return A_grid.transpose() * f;
}

double batch_loss(const SimStack& stack, const RMat& phi,
                  const AngularBatch& batch) {
  double loss = 0.0;
  const int I = static_cast<int>(batch.A.size());
  for (int i = 0; i < I; ++i) {
    CVec b = beampattern(batch.A[i], end_to_end(stack, phi, i));
    loss += (b - batch.q[i]).squaredNorm();
  }
  return loss / I;
}

namespace {

struct SubcarrierEval {
  double loss = 0.0;  // ||b - q||^2
  RMat grad;          // L x N
};

SubcarrierEval eval_subcarrier(const SimStack& stack, const RMat& phi,
                               const AngularBatch& batch, int i) {
  const int L = stack.L;
  const int N = stack.n_atoms();
  Recursion rec = forward_backward(stack, phi, i);
  CVec b = batch.A[i].transpose() * rec.f;
  CVec resid = b - batch.q[i];

  SubcarrierEval out;
  out.loss = resid.squaredNorm();
  out.grad.resize(L, N);
  CVec Ar = batch.A[i].conjugate() * resid;  // shared across layers
  for (int l = 0; l < L; ++l) {
    CVec u = rec.Lmat[l].adjoint() * Ar;
    for (int n = 0; n < N; ++n) {
      cplx ph = std::polar(1.0, -phi(l, n));
      out.grad(l, n) = 2.0 * std::imag(ph * std::conj(rec.r[l][n]) * u[n]);
    }
  }
  return out;
}

}  // namespace

RMat layer_gradients(const SimStack& stack, const RMat& phi,
                     const AngularBatch& batch, int i) {
  return eval_subcarrier(stack, phi, batch, i).grad;
}

double wrap_angle(double x) {
  double y = std::remainder(x, 2.0 * kPi);
  if (y <= -kPi) y += 2.0 * kPi;
  return y;
}

void adam_step(TrainState& state, RMat& phi, const RMat& mean_grad,
               const ScenarioConfig& cfg) {
  if (state.m.size() == 0) {
    state.m = RMat::Zero(phi.rows(), phi.cols());
    state.v = RMat::Zero(phi.rows(), phi.cols());
  }
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * mean_grad;
  state.v = cfg.beta2 * state.v +
            (1.0 - cfg.beta2) * mean_grad.cwiseProduct(mean_grad);
  double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  RMat mhat = state.m / bc1;
  RMat vhat = state.v / bc2;
  RMat step =
      cfg.eta * mhat.cwiseQuotient(vhat.cwiseSqrt().array().matrix() +
                                   RMat::Constant(phi.rows(), phi.cols(),
                                                  cfg.eps_adam));
  phi -= step;
  for (Eigen::Index r = 0; r < phi.rows(); ++r) {
    for (Eigen::Index c = 0; c < phi.cols(); ++c) {
      phi(r, c) = wrap_angle(phi(r, c));
    }
  }
}

double normalized_bp_error(const SimStack& stack, const RMat& phi,
                           const std::vector<CVec>& f_hat,
                           const ScenarioConfig& cfg) {
  AngularBatch grid = make_batch(evaluation_grid(), f_hat, cfg);
  double sum = 0.0;
  int counted = 0;
  for (int i = 0; i < cfg.I; ++i) {
    double qn = grid.q[i].squaredNorm();
    if (qn == 0.0) continue;
    CVec b = beampattern(grid.A[i], end_to_end(stack, phi, i));
    sum += (b - grid.q[i]).squaredNorm() / qn;
    ++counted;
  }
  return counted > 0 ? sum / counted : 0.0;
}

TrainResult train(const SimStack& stack, const std::vector<CVec>& f_hat,
                  const ScenarioConfig& cfg, int jobs) {
  if (f_hat.size() != static_cast<size_t>(cfg.I)) {
    throw InvalidInputError("train: one target beamformer per subcarrier");
  }
  TrainResult out;
  out.phi = stack.phi;

  // The evaluation grid is independent of the training batches; build its
  // steering matrices once.
  AngularBatch grid = make_batch(evaluation_grid(), f_hat, cfg);
  auto grid_error = [&](const RMat& phi) {
    double sum = 0.0;
    int counted = 0;
    for (int i = 0; i < cfg.I; ++i) {
      double qn = grid.q[i].squaredNorm();
      if (qn == 0.0) continue;
      CVec b = beampattern(grid.A[i], end_to_end(stack, phi, i));
      sum += (b - grid.q[i]).squaredNorm() / qn;
      ++counted;
    }
    return counted > 0 ? sum / counted : 0.0;
  };
  out.initial_bp_error = grid_error(out.phi);

  auto rng = make_rng(derive_seed(cfg.rng_seed, "train"));
  TrainState state;
  double scale_den = (cfg.grad_scale == GradScale::kAlgorithm)
                         ? static_cast<double>(cfg.I) * cfg.N_g
                         : static_cast<double>(cfg.I);

  std::vector<SubcarrierEval> evals(cfg.I);
  for (int e = 0; e < cfg.N_e; ++e) {
    double grad_norm_sum = 0.0;
    double loss_sum = 0.0;
    for (int b = 0; b < cfg.N_b; ++b) {
      auto dirs = sample_directions(cfg.N_g, cfg.el_sampling, rng);
      AngularBatch batch = make_batch(dirs, f_hat, cfg);
      parallel_for_indexed(cfg.I, jobs, [&](int i) {
        evals[i] = eval_subcarrier(stack, out.phi, batch, i);
      });
      RMat mean_grad = RMat::Zero(stack.L, stack.n_atoms());
      double loss = 0.0;
      for (int i = 0; i < cfg.I; ++i) {
        mean_grad += evals[i].grad;
        loss += evals[i].loss;
      }
      mean_grad /= scale_den;
      loss /= cfg.I;
      if (!std::isfinite(loss)) {
        throw NumericalError(
            "train: non-finite loss at epoch " + std::to_string(e + 1) +
            ", batch " + std::to_string(b + 1) + ", step " +
            std::to_string(state.t));
      }
      grad_norm_sum += mean_grad.norm();
      loss_sum += loss;
      adam_step(state, out.phi, mean_grad, cfg);
    }
    EpochStats stats;
    stats.mean_grad_norm = grad_norm_sum / cfg.N_b;
    stats.mean_loss = loss_sum / cfg.N_b;
    stats.bp_error = grid_error(out.phi);
    out.history.push_back(stats);
  }
  return out;
}

}  // namespace simcr
